// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "depthmine/types.hpp"

namespace depthmine {

/// nuScenes-convention evaluation constants: AP is averaged over these
/// center-distance matching thresholds, and the true-positive error means
/// are taken at kTpDistanceThreshold.
inline constexpr std::array<double, 4> kApDistanceThresholds{0.5, 1.0, 2.0, 4.0};
inline constexpr double kTpDistanceThreshold = 2.0;

struct MatchPair {
  std::size_t det_index;
  std::size_t gt_index;
  double distance;  // 2D center distance, meters
};

/// Result of greedy center-distance matching at one threshold. Pairs are in
/// descending detection-score order; each ground truth matches at most once.
struct MatchSet {
  double dist_thr = 0.0;
  std::vector<MatchPair> pairs;
  std::vector<std::size_t> unmatched_dets;  // false positives, score order
  std::vector<std::size_t> unmatched_gts;   // false negatives
};

/// Greedy matching: detections in descending fused-score order each take
/// the nearest unmatched same-class ground truth within dist_thr (2D
/// Euclidean center distance).
MatchSet match(const std::vector<Detection>& dets, const std::vector<Box3D>& gts,
               double dist_thr);

/// nuScenes-style average precision. The raw precision/recall curve from
/// the ranked detections is linearly interpolated onto 101 recall points
/// (constant on the left of the first operating point, zero beyond the
/// last); points with recall <= 0.1 are discarded, precision is clipped
/// from below by 0.1, and the mean of the remainder is renormalized by
/// 1/0.9. Returns 0 when there are no detections or no ground truths.
double average_precision(const MatchSet& matches, const std::vector<Detection>& dets,
                         std::size_t n_gt);

struct TpErrors {
  double ate;  // 2D center distance
  double ase;  // 1 - IoU of size-aligned boxes
  double aoe;  // smallest absolute yaw difference, in [0, pi]
  double ave;  // L2 velocity difference
  double aae;  // 1 - attribute-match indicator
};

/// Mean true-positive errors over the matched pairs. An empty match set
/// yields the worst case: every error defaults to 1.
TpErrors tp_errors(const MatchSet& matches, const std::vector<Detection>& dets,
                   const std::vector<Box3D>& gts);

/// nuScenes detection score:
/// NDS = (1/10) * [5 * map + sum over the five errors of (1 - min(1, e))].
double nds(double map, double ate, double ase, double aoe, double ave, double aae);

struct MetricSet {
  double map;
  double mate, mase, maoe, mave, maae;
  double nds;
};

/// Full evaluation: per-class AP averaged over the four distance
/// thresholds, TP error means at 2 m (classes with no matches contribute
/// the worst-case error 1), and the NDS composite. Classes are the distinct
/// class ids present in the ground truth; detections of absent classes are
/// ignored. Throws std::invalid_argument when gts is empty.
MetricSet evaluate(const std::vector<Detection>& dets, const std::vector<Box3D>& gts);

/// Per-class ATE at the 2 m threshold (1.0 for classes with no matches).
std::vector<std::pair<int, double>> per_class_ate(const std::vector<Detection>& dets,
                                                  const std::vector<Box3D>& gts);

/// {"map":..,"mate":..,"mase":..,"maoe":..,"mave":..,"maae":..,"nds":..}
std::string metricset_to_json(const MetricSet& metrics);

}  // namespace depthmine
