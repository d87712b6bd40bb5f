// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "depthmine/types.hpp"

namespace depthmine {

/// Configuration for the synthetic regression task. Inlier depth is a fixed
/// smooth function of the features plus Gaussian noise; an outlier's depth
/// is drawn uniformly from the depth range, independent of its features, so
/// no model can predict it. Exactly round(outlier_fraction * n_samples)
/// rows are outliers, at seed-shuffled positions.
struct SynthConfig {
  int n_samples = 1000;
  int feature_dim = 6;
  double outlier_fraction = 0.0;  // in [0, 1)
  double depth_min = 1.0;         // meters
  double depth_max = 60.0;        // meters
  double noise_sigma = 0.0;       // meters
  // When set, the last feature coordinate is overwritten with -1 for
  // inliers and +1 for outliers. Mining strategies can only down-weight
  // outliers that are distinguishable from the features; this makes that
  // premise explicit and controllable.
  bool outlier_identifiable = true;
  std::uint64_t seed = 0;
};

void validate(const SynthConfig& cfg);

/// The fixed inlier depth map g(x): features are blended by geometrically
/// decaying coefficients a_j = 2^-j (normalized to sum 1), giving
/// s in [-1, 1]; depth is the affine-plus-sine warp
///   d = depth_min + (depth_max - depth_min) * (0.5 + 0.4 s + 0.1 sin(3 s)).
/// Smooth and monotone enough to be learnable, non-linear enough that the
/// strategies do not all converge instantly.
double clean_depth_map(const SynthConfig& cfg, const double* features);

SampleBatch generate_regression(const SynthConfig& cfg);

/// Variant that redraws only the outlier depth stream; features, flags and
/// inlier depths are identical to generate_regression(cfg). Exists so tests
/// can assert outlier depth carries no feature information.
SampleBatch generate_regression(const SynthConfig& cfg,
                                std::uint64_t outlier_stream_seed);

/// Configuration for synthetic 3D scenes: ground-truth boxes on a sparse
/// grid plus per-box duplicate detections with jittered centers and score
/// triples constructed so the best-centered duplicate often does not carry
/// the best class score (while s_dq stays informative of center quality).
struct SceneConfig {
  int n_boxes = 40;
  int dets_per_box = 4;
  double center_jitter = 0.5;  // scales every geometric perturbation; 0 = exact copies
  int n_classes = 3;
  // Probability that the top class score is handed to a non-best duplicate.
  double cls_flip_prob = 0.75;
  std::uint64_t seed = 0;
};

void validate(const SceneConfig& cfg);

struct SynthScene {
  std::vector<Box3D> gts;
  std::vector<Detection> dets;
  std::vector<int> det_gt_index;  // generator provenance; not exported
};

SynthScene generate_scene(const SceneConfig& cfg);

}  // namespace depthmine
