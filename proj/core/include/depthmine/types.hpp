// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace depthmine {

enum class QualityMetric { kRelative, kGaussian };

const char* quality_metric_name(QualityMetric metric);
QualityMetric quality_metric_from_name(const std::string& name);

/// Depth-quality metric selection. beta controls how fast quality decays
/// with prediction error: dimensionless for the relative metric, meters for
/// the Gaussian one.
struct QualityParams {
  QualityMetric metric = QualityMetric::kRelative;
  double beta = 2.0;
};

void validate(const QualityParams& params);

/// A batch of positive regression samples: per-row features, ground-truth
/// depth in meters, and a synthetic-provenance outlier flag. The flag is
/// bookkeeping for dataset generation and reporting; nothing on the model
/// or loss path reads it.
struct SampleBatch {
  int n = 0;
  int feature_dim = 0;
  std::vector<double> features;      // row-major [n x feature_dim]
  std::vector<double> gt_depth;      // [n], meters, all > 0
  std::vector<std::uint8_t> outlier_flag;  // [n]

  double feature(int row, int col) const {
    return features[static_cast<std::size_t>(row) * feature_dim + col];
  }
};

void validate(const SampleBatch& batch);

/// Per-sample head outputs: predicted depth (meters), predicted depth
/// quality, class score and centerness. dq/cls/ctr are squashed into (0,1).
struct HeadOutputs {
  std::vector<double> depth;
  std::vector<double> dq;
  std::vector<double> cls;
  std::vector<double> ctr;
};

void validate(const HeadOutputs& outputs, int n);

/// Wraps an angle into [-pi, pi).
double normalize_yaw(double yaw);

/// An upright 3D box. yaw is the heading around +z, normalized into
/// [-pi, pi) at construction; length runs along the heading, width across it.
struct Box3D {
  double x = 0.0, y = 0.0, z = 0.0;   // center, meters
  double w = 1.0, l = 1.0, h = 1.0;   // size, meters, all > 0
  double yaw = 0.0;                   // radians in [-pi, pi)
  double vx = 0.0, vy = 0.0;          // velocity, m/s
  int class_id = 0;
  int attribute_id = 0;

  Box3D() = default;
  Box3D(double cx, double cy, double cz, double width, double length,
        double height, double heading, double velocity_x, double velocity_y,
        int cls, int attribute);
};

void validate(const Box3D& box);

/// A scored detection: box geometry plus the class/centerness/depth-quality
/// score triple and the fused ranking score. Under the default score mode
/// the fused score is sqrt(s_cls * s_ctr * s_dq); boxgeom::make_detection
/// computes and asserts that form.
struct Detection {
  Box3D box;
  double s_cls = 0.0;
  double s_ctr = 0.0;
  double s_dq = 0.0;
  double fused = 0.0;
};

void validate(const Detection& det);

}  // namespace depthmine
