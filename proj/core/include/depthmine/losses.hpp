// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "depthmine/types.hpp"

namespace depthmine {

/// Depth-mining training strategies.
///
///   kBaseline       plain smooth-L1 depth regression
///   kSubjectiveEasy depth loss reweighted by measured quality DQ+ (no
///                   learned component)
///   kHard           depth loss reweighted by DQ- = 1/DQ - 1
///   kMpm            quality head trained with BCE against measured quality;
///                   its (detached) prediction reweights the depth loss
///   kGmm            depth loss kept intact; the BCE quality loss also
///                   back-propagates through its *target*, feeding depth an
///                   extra gradient scaled by log((1-DQ)/DQ)
enum class Strategy { kBaseline, kSubjectiveEasy, kHard, kMpm, kGmm };

const char* strategy_name(Strategy strategy);
Strategy strategy_from_name(const std::string& name);

struct StrategyConfig {
  Strategy strategy = Strategy::kBaseline;
  QualityParams quality;
  double depth_loss_weight = 1.0;  // 0.2 is a common warm-up value
  double dq_loss_weight = 1.0;
};

void validate(const StrategyConfig& cfg);

struct SmoothL1Terms {
  double value;
  double grad_pred;
};

/// Smooth L1 with transition point 1:
/// 0.5 d^2 for |d| < 1, |d| - 0.5 otherwise, d = pred - target.
SmoothL1Terms smooth_l1(double pred, double target);

struct BceTerms {
  double value;
  double grad_pred;
  double grad_target;
};

/// Soft-target binary cross entropy -[t ln p + (1-t) ln(1-p)] with p
/// clamped to [1e-6, 1-1e-6]. grad_target = ln((1-p)/p) is the closed form
/// the gradient-aware mining path feeds back into depth.
BceTerms bce(double pred_q, double target_q);

/// d(BCE)/d(target) = ln((1-p)/p): zero at p = 0.5, antisymmetric about it,
/// and growing in magnitude as p approaches either end.
double gam_target_grad(double pred_dq);

/// Loss value and the gradients it sends to the depth and quality heads.
/// per_sample holds the unweighted smooth-L1 task losses; grads_depth and
/// grads_dq are d(total)/d(depth_i) and d(total)/d(dq_i).
struct LossReport {
  double total = 0.0;
  std::vector<double> per_sample;
  std::vector<double> grads_depth;
  std::vector<double> grads_dq;
};

/// Quantities a strategy treats as constants when differentiating: the
/// normalized mining weights and, for MPM, the frozen BCE targets. Capturing
/// them explicitly lets tests re-evaluate the loss at perturbed inputs with
/// the same constants, which is how the reported gradients are defined.
struct DetachedTerms {
  std::vector<double> weights;      // empty when the strategy does not mine
  std::vector<double> bce_targets;  // empty unless targets are detached (MPM)
};

DetachedTerms detach_terms(const StrategyConfig& cfg, const SampleBatch& batch,
                           const HeadOutputs& outputs);

/// Total loss value given detached constants. For GMM the BCE targets are
/// live (recomputed from the current depths) so the value moves with them.
double strategy_total(const StrategyConfig& cfg, const SampleBatch& batch,
                      const HeadOutputs& outputs, const DetachedTerms& detached);

/// Evaluates the configured strategy: captures the detached terms, computes
/// the total, and reports per-head gradients. Throws std::invalid_argument
/// on length mismatches and std::runtime_error if any gradient is NaN.
LossReport strategy_loss(const StrategyConfig& cfg, const SampleBatch& batch,
                         const HeadOutputs& outputs);

}  // namespace depthmine
