// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "depthmine/types.hpp"

namespace depthmine {

/// Clamp bound applied to quality scores before reciprocal or logarithmic
/// transforms downstream.
inline constexpr double kDqEpsilon = 1e-6;

/// Clamps a quality score into [kDqEpsilon, 1 - kDqEpsilon].
double clamp_dq(double dq);

/// Relative depth quality: 1 / (beta * |d_p - d_g| / d_g + 1).
/// Equals 1 exactly when d_p == d_g and decays with the relative error.
/// Scale-invariant: scaling d_p and d_g together leaves it unchanged.
double dq_relative(double d_p, double d_g, double beta);

/// Gaussian depth quality: exp(-(d_g - d_p)^2 / (2 beta^2)), beta in meters.
double dq_gaussian(double d_p, double d_g, double beta);

/// Evaluates whichever metric params selects.
double dq(const QualityParams& params, double d_p, double d_g);

/// Analytic derivative of the selected metric with respect to d_p.
/// The relative metric has a kink at d_p == d_g; by convention the
/// subgradient there is 0 (the point is the optimum, and 0 is stable).
double dq_grad(const QualityParams& params, double d_p, double d_g);

enum class MiningMode {
  kEasyPlus,   // DQ+ = DQ
  kHardMinus,  // DQ- = 1/DQ - 1
};

/// Easy/hard mining weight transforms. Input below kDqEpsilon is clamped
/// first, so HardMinus is bounded by 1/kDqEpsilon - 1.
double mining_transform(double dq, MiningMode mode);

/// Per-sample quality targets for the selected metric, evaluated at the
/// predicted depths. Every element lies in (0, 1].
struct QualityTarget {
  std::vector<double> dq_hat;
};

QualityTarget quality_targets(const QualityParams& params,
                              const SampleBatch& batch,
                              const std::vector<double>& depth_pred);

struct DqCurvePoint {
  double beta;
  double rel_error;
  double dq;
};

/// Tabulates quality against relative depth error for each parameter set.
/// The error is interpreted against a unit ground-truth depth, i.e. each
/// point is dq(params, 1 + rel_error, 1).
std::vector<DqCurvePoint> dq_curve(const std::vector<QualityParams>& params_list,
                                   const std::vector<double>& rel_error_grid);

/// Renders a curve table as CSV with header "beta,rel_error,dq".
std::string dq_curve_csv(const std::vector<DqCurvePoint>& table);

}  // namespace depthmine
