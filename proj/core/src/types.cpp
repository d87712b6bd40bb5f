// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include "depthmine/types.hpp"

#include <cmath>
#include <stdexcept>

namespace depthmine {

namespace {
constexpr double kPi = 3.141592653589793238462643383280;

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}
}  // namespace

const char* quality_metric_name(QualityMetric metric) {
  return metric == QualityMetric::kRelative ? "relative" : "gaussian";
}

QualityMetric quality_metric_from_name(const std::string& name) {
  if (name == "relative") return QualityMetric::kRelative;
  if (name == "gaussian") return QualityMetric::kGaussian;
  throw std::invalid_argument("unknown quality metric: " + name);
}

void validate(const QualityParams& params) {
  if (!(params.beta > 0.0) || !std::isfinite(params.beta)) {
    throw std::domain_error("QualityParams: beta must be a positive finite real");
  }
}

void validate(const SampleBatch& batch) {
  if (batch.n < 0 || batch.feature_dim <= 0) {
    throw std::invalid_argument("SampleBatch: n must be >= 0 and feature_dim >= 1");
  }
  const auto n = static_cast<std::size_t>(batch.n);
  if (batch.features.size() != n * static_cast<std::size_t>(batch.feature_dim) ||
      batch.gt_depth.size() != n || batch.outlier_flag.size() != n) {
    throw std::invalid_argument("SampleBatch: field lengths do not match n");
  }
  if (!all_finite(batch.features)) {
    throw std::invalid_argument("SampleBatch: features must be finite");
  }
  for (double d : batch.gt_depth) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw std::domain_error("SampleBatch: gt_depth must be positive and finite");
    }
  }
}

void validate(const HeadOutputs& outputs, int n) {
  const auto expected = static_cast<std::size_t>(n);
  if (outputs.depth.size() != expected || outputs.dq.size() != expected ||
      outputs.cls.size() != expected || outputs.ctr.size() != expected) {
    throw std::invalid_argument("HeadOutputs: vector lengths do not match batch size");
  }
  if (!all_finite(outputs.depth)) {
    throw std::invalid_argument("HeadOutputs: depth must be finite");
  }
  for (double q : outputs.dq) {
    if (!(q > 0.0 && q < 1.0)) {
      throw std::domain_error("HeadOutputs: dq must lie strictly inside (0,1)");
    }
  }
  for (double s : outputs.cls) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("HeadOutputs: cls must lie in [0,1]");
  }
  for (double s : outputs.ctr) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("HeadOutputs: ctr must lie in [0,1]");
  }
}

double normalize_yaw(double yaw) {
  if (!std::isfinite(yaw)) throw std::domain_error("yaw must be finite");
  double wrapped = std::remainder(yaw, 2.0 * kPi);  // [-pi, pi]
  if (wrapped >= kPi) wrapped -= 2.0 * kPi;
  return wrapped;
}

Box3D::Box3D(double cx, double cy, double cz, double width, double length,
             double height, double heading, double velocity_x,
             double velocity_y, int cls, int attribute)
    : x(cx), y(cy), z(cz), w(width), l(length), h(height),
      yaw(normalize_yaw(heading)), vx(velocity_x), vy(velocity_y),
      class_id(cls), attribute_id(attribute) {
  validate(*this);
}

void validate(const Box3D& box) {
  if (!(box.w > 0.0 && box.l > 0.0 && box.h > 0.0)) {
    throw std::domain_error("Box3D: w, l, h must be positive");
  }
  if (!(box.yaw >= -kPi && box.yaw < kPi)) {
    throw std::domain_error("Box3D: yaw must lie in [-pi, pi)");
  }
  for (double v : {box.x, box.y, box.z, box.w, box.l, box.h, box.vx, box.vy}) {
    if (!std::isfinite(v)) throw std::domain_error("Box3D: fields must be finite");
  }
}

void validate(const Detection& det) {
  validate(det.box);
  for (double s : {det.s_cls, det.s_ctr, det.s_dq, det.fused}) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw std::domain_error("Detection: scores must lie in [0,1]");
    }
  }
}

}  // namespace depthmine
