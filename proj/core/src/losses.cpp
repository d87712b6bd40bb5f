// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include "depthmine/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "depthmine/mining.hpp"
#include "depthmine/quality.hpp"

namespace depthmine {

const char* strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::kBaseline: return "baseline";
    case Strategy::kSubjectiveEasy: return "subjective_easy";
    case Strategy::kHard: return "hard";
    case Strategy::kMpm: return "mpm";
    case Strategy::kGmm: return "gmm";
  }
  return "unknown";
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "baseline") return Strategy::kBaseline;
  if (name == "subjective_easy") return Strategy::kSubjectiveEasy;
  if (name == "hard") return Strategy::kHard;
  if (name == "mpm") return Strategy::kMpm;
  if (name == "gmm") return Strategy::kGmm;
  throw std::invalid_argument("unknown strategy: " + name);
}

void validate(const StrategyConfig& cfg) {
  validate(cfg.quality);
  if (!(cfg.depth_loss_weight >= 0.0) || !(cfg.dq_loss_weight >= 0.0)) {
    throw std::domain_error("StrategyConfig: loss weights must be >= 0");
  }
}

SmoothL1Terms smooth_l1(double pred, double target) {
  if (!std::isfinite(pred) || !std::isfinite(target)) {
    throw std::domain_error("smooth_l1: inputs must be finite");
  }
  const double d = pred - target;
  const double a = std::abs(d);
  if (a < 1.0) {
    return {0.5 * d * d, d};
  }
  return {a - 0.5, d > 0.0 ? 1.0 : -1.0};
}

BceTerms bce(double pred_q, double target_q) {
  const double p = clamp_dq(pred_q);
  const double t = target_q;
  BceTerms terms;
  terms.value = -(t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
  terms.grad_pred = -t / p + (1.0 - t) / (1.0 - p);
  terms.grad_target = std::log((1.0 - p) / p);
  return terms;
}

double gam_target_grad(double pred_dq) {
  const double p = clamp_dq(pred_dq);
  return std::log((1.0 - p) / p);
}

namespace {

std::vector<double> task_losses(const SampleBatch& batch,
                                const HeadOutputs& outputs) {
  std::vector<double> losses(batch.n);
  for (int i = 0; i < batch.n; ++i) {
    losses[i] = smooth_l1(outputs.depth[i], batch.gt_depth[i]).value;
  }
  return losses;
}

void check_shapes(const SampleBatch& batch, const HeadOutputs& outputs) {
  const auto n = static_cast<std::size_t>(batch.n);
  if (outputs.depth.size() != n || outputs.dq.size() != n) {
    throw std::invalid_argument("strategy_loss: outputs inconsistent with batch");
  }
}

}  // namespace

DetachedTerms detach_terms(const StrategyConfig& cfg, const SampleBatch& batch,
                           const HeadOutputs& outputs) {
  validate(cfg);
  check_shapes(batch, outputs);
  DetachedTerms detached;
  switch (cfg.strategy) {
    case Strategy::kBaseline:
    case Strategy::kGmm:
      break;
    case Strategy::kSubjectiveEasy:
    case Strategy::kHard: {
      const auto losses = task_losses(batch, outputs);
      const auto mode = cfg.strategy == Strategy::kSubjectiveEasy
                            ? MiningMode::kEasyPlus
                            : MiningMode::kHardMinus;
      std::vector<double> raw(batch.n);
      for (int i = 0; i < batch.n; ++i) {
        raw[i] = mining_transform(dq(cfg.quality, outputs.depth[i], batch.gt_depth[i]), mode);
      }
      detached.weights = normalize_weights(raw, losses);
      break;
    }
    case Strategy::kMpm: {
      const auto losses = task_losses(batch, outputs);
      std::vector<double> raw(batch.n);
      for (int i = 0; i < batch.n; ++i) raw[i] = clamp_dq(outputs.dq[i]);
      detached.weights = normalize_weights(raw, losses);
      detached.bce_targets.resize(batch.n);
      for (int i = 0; i < batch.n; ++i) {
        detached.bce_targets[i] = dq(cfg.quality, outputs.depth[i], batch.gt_depth[i]);
      }
      break;
    }
  }
  return detached;
}

double strategy_total(const StrategyConfig& cfg, const SampleBatch& batch,
                      const HeadOutputs& outputs, const DetachedTerms& detached) {
  check_shapes(batch, outputs);
  const int n = batch.n;
  if (n == 0) return 0.0;
  const auto losses = task_losses(batch, outputs);

  double depth_term = 0.0;
  if (detached.weights.empty()) {
    for (double l : losses) depth_term += l;
  } else {
    if (detached.weights.size() != losses.size()) {
      throw std::invalid_argument("strategy_total: detached weight length mismatch");
    }
    depth_term = mining_loss(detached.weights, losses);
  }
  depth_term /= n;

  double quality_term = 0.0;
  if (cfg.strategy == Strategy::kMpm) {
    for (int i = 0; i < n; ++i) {
      quality_term += bce(outputs.dq[i], detached.bce_targets[i]).value;
    }
    quality_term /= n;
  } else if (cfg.strategy == Strategy::kGmm) {
    for (int i = 0; i < n; ++i) {
      const double target = dq(cfg.quality, outputs.depth[i], batch.gt_depth[i]);
      quality_term += bce(outputs.dq[i], target).value;
    }
    quality_term /= n;
  }

  return cfg.depth_loss_weight * depth_term + cfg.dq_loss_weight * quality_term;
}

LossReport strategy_loss(const StrategyConfig& cfg, const SampleBatch& batch,
                         const HeadOutputs& outputs) {
  const DetachedTerms detached = detach_terms(cfg, batch, outputs);
  const int n = batch.n;

  LossReport report;
  report.per_sample.resize(n);
  report.grads_depth.assign(n, 0.0);
  report.grads_dq.assign(n, 0.0);

  const double w_d = cfg.depth_loss_weight;
  const double w_q = cfg.dq_loss_weight;

  for (int i = 0; i < n; ++i) {
    const auto l1 = smooth_l1(outputs.depth[i], batch.gt_depth[i]);
    report.per_sample[i] = l1.value;

    const double mining_weight = detached.weights.empty() ? 1.0 : detached.weights[i];
    report.grads_depth[i] = w_d * mining_weight * l1.grad_pred / n;

    if (cfg.strategy == Strategy::kMpm) {
      const auto terms = bce(outputs.dq[i], detached.bce_targets[i]);
      report.grads_dq[i] = w_q * terms.grad_pred / n;
    } else if (cfg.strategy == Strategy::kGmm) {
      const double target = dq(cfg.quality, outputs.depth[i], batch.gt_depth[i]);
      const auto terms = bce(outputs.dq[i], target);
      report.grads_dq[i] = w_q * terms.grad_pred / n;
      // Gradient-through-target: the BCE target moves with the predicted
      // depth, so depth receives grad_target * d(DQ_hat)/d(depth).
      report.grads_depth[i] +=
          w_q * terms.grad_target * dq_grad(cfg.quality, outputs.depth[i], batch.gt_depth[i]) / n;
    }
  }

  report.total = strategy_total(cfg, batch, outputs, detached);

  for (int i = 0; i < n; ++i) {
    if (std::isnan(report.grads_depth[i]) || std::isnan(report.grads_dq[i])) {
      throw std::runtime_error("strategy_loss: NaN gradient at sample " + std::to_string(i));
    }
  }
  return report;
}

}  // namespace depthmine
