// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include "depthmine/quality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace depthmine {

double clamp_dq(double dq) {
  return std::clamp(dq, kDqEpsilon, 1.0 - kDqEpsilon);
}

namespace {
void check_inputs(double d_p, double d_g, double beta, bool require_positive_dg) {
  if (!std::isfinite(d_p)) throw std::domain_error("dq: d_p must be finite");
  if (!std::isfinite(d_g) || (require_positive_dg && !(d_g > 0.0))) {
    throw std::domain_error("dq: d_g must be positive and finite");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::domain_error("dq: beta must be positive and finite");
  }
}
}  // namespace

double dq_relative(double d_p, double d_g, double beta) {
  check_inputs(d_p, d_g, beta, true);
  return 1.0 / (beta * std::abs(d_p - d_g) / d_g + 1.0);
}

double dq_gaussian(double d_p, double d_g, double beta) {
  check_inputs(d_p, d_g, beta, false);
  const double diff = d_g - d_p;
  return std::exp(-diff * diff / (2.0 * beta * beta));
}

double dq(const QualityParams& params, double d_p, double d_g) {
  return params.metric == QualityMetric::kRelative
             ? dq_relative(d_p, d_g, params.beta)
             : dq_gaussian(d_p, d_g, params.beta);
}

double dq_grad(const QualityParams& params, double d_p, double d_g) {
  if (params.metric == QualityMetric::kRelative) {
    const double q = dq_relative(d_p, d_g, params.beta);
    const double diff = d_p - d_g;
    if (diff == 0.0) return 0.0;  // subgradient at the kink
    const double sign = diff > 0.0 ? 1.0 : -1.0;
    return -params.beta * sign / d_g * q * q;
  }
  const double q = dq_gaussian(d_p, d_g, params.beta);
  return q * (d_g - d_p) / (params.beta * params.beta);
}

double mining_transform(double dq, MiningMode mode) {
  const double q = std::max(dq, kDqEpsilon);
  switch (mode) {
    case MiningMode::kEasyPlus:
      return q;
    case MiningMode::kHardMinus:
      return 1.0 / q - 1.0;
  }
  throw std::invalid_argument("mining_transform: unknown mode");
}

QualityTarget quality_targets(const QualityParams& params,
                              const SampleBatch& batch,
                              const std::vector<double>& depth_pred) {
  validate(params);
  if (depth_pred.size() != static_cast<std::size_t>(batch.n)) {
    throw std::invalid_argument("quality_targets: depth_pred length mismatch");
  }
  QualityTarget target;
  target.dq_hat.resize(depth_pred.size());
  for (std::size_t i = 0; i < depth_pred.size(); ++i) {
    target.dq_hat[i] = dq(params, depth_pred[i], batch.gt_depth[i]);
  }
  return target;
}

std::vector<DqCurvePoint> dq_curve(const std::vector<QualityParams>& params_list,
                                   const std::vector<double>& rel_error_grid) {
  for (double e : rel_error_grid) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw std::domain_error("dq_curve: grid values must be >= 0");
    }
  }
  std::vector<DqCurvePoint> table;
  table.reserve(params_list.size() * rel_error_grid.size());
  for (const auto& params : params_list) {
    validate(params);
    for (double e : rel_error_grid) {
      table.push_back({params.beta, e, dq(params, 1.0 + e, 1.0)});
    }
  }
  return table;
}

std::string dq_curve_csv(const std::vector<DqCurvePoint>& table) {
  std::ostringstream os;
  os.precision(17);
  os << "beta,rel_error,dq\n";
  for (const auto& row : table) {
    os << row.beta << ',' << row.rel_error << ',' << row.dq << '\n';
  }
  return os.str();
}

}  // namespace depthmine
