// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "depthmine/losses.hpp"
#include "depthmine/model.hpp"
#include "depthmine/rng.hpp"
#include "test_support.hpp"

using namespace depthmine;
using depthmine::test::central_diff;
using depthmine::test::rel_close;

namespace {

// Random batch/outputs that stay clear of the smooth-L1 kinks (|d| near 0
// or 1) and the relative-metric kink (d = 0), so finite differences are
// well-conditioned.
struct Instance {
  SampleBatch batch;
  HeadOutputs outputs;
};

Instance random_instance(Rng& rng, int n) {
  Instance inst;
  inst.batch.n = n;
  inst.batch.feature_dim = 1;
  inst.batch.features.assign(n, 0.0);
  inst.batch.outlier_flag.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const double d_g = rng.uniform(2.0, 60.0);
    double mag = rng.uniform01() < 0.5 ? rng.uniform(0.1, 0.9) : rng.uniform(1.1, 20.0);
    const double d_p = d_g + (rng.uniform01() < 0.5 ? -mag : mag);
    inst.batch.gt_depth.push_back(d_g);
    inst.outputs.depth.push_back(d_p);
    inst.outputs.dq.push_back(rng.uniform(0.05, 0.95));
    inst.outputs.cls.push_back(rng.uniform01());
    inst.outputs.ctr.push_back(rng.uniform01());
  }
  return inst;
}

constexpr Strategy kAllStrategies[] = {Strategy::kBaseline, Strategy::kSubjectiveEasy,
                                       Strategy::kHard, Strategy::kMpm, Strategy::kGmm};

}  // namespace

TEST_CASE("smooth L1 branches") {
  auto r = smooth_l1(10, 10);
  CHECK(r.value == 0.0);
  CHECK(r.grad_pred == 0.0);
  r = smooth_l1(10.5, 10);
  CHECK(r.value == doctest::Approx(0.125));
  CHECK(r.grad_pred == doctest::Approx(0.5));
  r = smooth_l1(12, 10);
  CHECK(r.value == doctest::Approx(1.5));
  CHECK(r.grad_pred == 1.0);
  r = smooth_l1(8, 10);
  CHECK(r.grad_pred == -1.0);
  CHECK_THROWS_AS(smooth_l1(std::nan(""), 1.0), std::domain_error);
}

TEST_CASE("smooth L1 gradient matches finite differences") {
  Rng rng(21);
  for (int i = 0; i < 500; ++i) {
    const double target = rng.uniform(-10, 10);
    double mag = rng.uniform01() < 0.5 ? rng.uniform(0.05, 0.9) : rng.uniform(1.1, 10.0);
    const double pred = target + (rng.uniform01() < 0.5 ? -mag : mag);
    const double numeric = central_diff(
        [&](double x) { return smooth_l1(x, target).value; }, pred, 1e-6);
    CHECK(rel_close(smooth_l1(pred, target).grad_pred, numeric, 1e-6));
  }
}

TEST_CASE("soft-target BCE values and gradients") {
  auto terms = bce(0.5, 0.5);
  CHECK(terms.value == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(terms.grad_pred == doctest::Approx(0.0));
  CHECK(terms.grad_target == doctest::Approx(0.0));

  CHECK(bce(0.8, 1.0).value == doctest::Approx(0.2231435513142097).epsilon(1e-12));
  CHECK(bce(0.8, 0.6).grad_target == doctest::Approx(-1.3862943611198906).epsilon(1e-12));

  // Out-of-range predictions clamp rather than blow up.
  CHECK(bce(0.0, 1.0).value == bce(1e-9, 1.0).value);
  CHECK(std::isfinite(bce(1.0, 0.0).value));

  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const double p = rng.uniform(0.02, 0.98);
    const double t = rng.uniform(0.0, 1.0);
    const double numeric_p = central_diff(
        [&](double x) { return bce(x, t).value; }, p, 1e-7);
    CHECK(rel_close(bce(p, t).grad_pred, numeric_p, 1e-5));
    const double numeric_t = central_diff(
        [&](double x) { return bce(p, x).value; }, t, 1e-7);
    CHECK(rel_close(bce(p, t).grad_target, numeric_t, 1e-6));
  }
}

TEST_CASE("BCE is minimized where the prediction equals the soft target") {
  Rng rng(44);
  for (int i = 0; i < 100; ++i) {
    const double t = rng.uniform(0.05, 0.95);
    CHECK(bce(t, t).grad_pred == 0.0);
    const double at_target = bce(t, t).value;
    CHECK(bce(t + 0.01, t).value > at_target);
    CHECK(bce(t - 0.01, t).value > at_target);
  }
}

TEST_CASE("gam_target_grad closed form") {
  CHECK(gam_target_grad(0.5) == 0.0);
  CHECK(gam_target_grad(0.9) == doctest::Approx(-2.1972245773362196).epsilon(1e-12));
  CHECK(gam_target_grad(0.1) == doctest::Approx(2.1972245773362196).epsilon(1e-12));

  Rng rng(6);
  double prev_p = 0.01, prev_g = gam_target_grad(0.01);
  for (int i = 0; i < 200; ++i) {
    const double p = prev_p + 0.98 / 210.0;
    const double g = gam_target_grad(p);
    CHECK(g < prev_g);  // strictly decreasing
    CHECK(rel_close(gam_target_grad(1.0 - p), -g, 1e-12));
    prev_p = p;
    prev_g = g;
  }
}

TEST_CASE("baseline strategy on a single sample") {
  StrategyConfig cfg;
  cfg.strategy = Strategy::kBaseline;
  Instance inst;
  inst.batch.n = 1;
  inst.batch.feature_dim = 1;
  inst.batch.features = {0.0};
  inst.batch.gt_depth = {10.0};
  inst.batch.outlier_flag = {0};
  inst.outputs.depth = {12.0};
  inst.outputs.dq = {0.5};
  inst.outputs.cls = {0.5};
  inst.outputs.ctr = {0.5};

  const auto report = strategy_loss(cfg, inst.batch, inst.outputs);
  CHECK(report.total == doctest::Approx(1.5));
  CHECK(report.grads_depth[0] == doctest::Approx(1.0));
  CHECK(report.grads_dq[0] == 0.0);
  CHECK(report.per_sample[0] == doctest::Approx(1.5));
}

TEST_CASE("subjective and hard mining conserve the baseline total") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_instance(rng, 1 + static_cast<int>(rng.uniform_int(32)));
    StrategyConfig cfg;
    cfg.strategy = Strategy::kBaseline;
    const double baseline_total = strategy_loss(cfg, inst.batch, inst.outputs).total;

    for (Strategy s : {Strategy::kSubjectiveEasy, Strategy::kHard}) {
      cfg.strategy = s;
      const auto report = strategy_loss(cfg, inst.batch, inst.outputs);
      CHECK(rel_close(report.total, baseline_total, 1e-9));
    }
  }
}

TEST_CASE("GMM is stationary at a perfect prediction") {
  StrategyConfig cfg;
  cfg.strategy = Strategy::kGmm;
  Instance inst;
  inst.batch.n = 1;
  inst.batch.feature_dim = 1;
  inst.batch.features = {0.0};
  inst.batch.gt_depth = {10.0};
  inst.batch.outlier_flag = {0};
  inst.outputs.depth = {10.0};
  inst.outputs.dq = {0.5};
  inst.outputs.cls = {0.5};
  inst.outputs.ctr = {0.5};
  const auto report = strategy_loss(cfg, inst.batch, inst.outputs);
  CHECK(report.grads_depth[0] == 0.0);
}

TEST_CASE("GMM feeds the BCE target gradient into depth") {
  StrategyConfig cfg;
  cfg.strategy = Strategy::kGmm;
  cfg.quality = {QualityMetric::kRelative, 2.0};
  Instance inst;
  inst.batch.n = 1;
  inst.batch.feature_dim = 1;
  inst.batch.features = {0.0};
  inst.batch.gt_depth = {10.0};
  inst.batch.outlier_flag = {0};
  inst.outputs.depth = {12.0};
  inst.outputs.dq = {0.9};
  inst.outputs.cls = {0.5};
  inst.outputs.ctr = {0.5};

  const auto report = strategy_loss(cfg, inst.batch, inst.outputs);
  // ln(0.1/0.9) * (-5/49) on top of the unit smooth-L1 gradient.
  CHECK(report.grads_depth[0] - 1.0 ==
        doctest::Approx(0.22420658952410402).epsilon(1e-9));

  // The full depth gradient matches a finite difference of the live total.
  const auto detached = detach_terms(cfg, inst.batch, inst.outputs);
  const double numeric = central_diff(
      [&](double x) {
        HeadOutputs moved = inst.outputs;
        moved.depth[0] = x;
        return strategy_total(cfg, inst.batch, moved, detached);
      },
      inst.outputs.depth[0], 1e-6);
  CHECK(rel_close(report.grads_depth[0], numeric, 1e-5));
}

TEST_CASE("reported gradients match finite differences for every strategy") {
  Rng rng(2718);
  for (Strategy strategy : kAllStrategies) {
    StrategyConfig cfg;
    cfg.strategy = strategy;
    cfg.quality = {QualityMetric::kRelative, 2.0};
    cfg.depth_loss_weight = 1.0;
    cfg.dq_loss_weight = 1.0;
    for (int trial = 0; trial < 10; ++trial) {
      const auto inst = random_instance(rng, 1 + static_cast<int>(rng.uniform_int(32)));
      const auto detached = detach_terms(cfg, inst.batch, inst.outputs);
      const auto report = strategy_loss(cfg, inst.batch, inst.outputs);

      for (int i = 0; i < inst.batch.n; ++i) {
        const double numeric_depth = central_diff(
            [&](double x) {
              HeadOutputs moved = inst.outputs;
              moved.depth[i] = x;
              return strategy_total(cfg, inst.batch, moved, detached);
            },
            inst.outputs.depth[i], 1e-6);
        CHECK_MESSAGE(rel_close(report.grads_depth[i], numeric_depth, 1e-5),
                      std::string(strategy_name(strategy)), " depth grad i=", i,
                      " analytic=", report.grads_depth[i], " numeric=", numeric_depth);

        // A larger step for the dq direction: the total is dominated by the
        // depth term, so a tiny step drowns the difference in cancellation.
        const double numeric_dq = central_diff(
            [&](double x) {
              HeadOutputs moved = inst.outputs;
              moved.dq[i] = x;
              return strategy_total(cfg, inst.batch, moved, detached);
            },
            inst.outputs.dq[i], 1e-5);
        CHECK_MESSAGE(rel_close(report.grads_dq[i], numeric_dq, 1e-5),
                      std::string(strategy_name(strategy)), " dq grad i=", i);
      }
    }
  }
}

TEST_CASE("easy-mining direction: confident predictions pull harder") {
  // For a fixed depth error the magnitude of the BCE-path depth gradient
  // grows as the predicted quality moves from 0.5 toward 1.
  StrategyConfig cfg;
  cfg.strategy = Strategy::kGmm;
  Instance inst;
  inst.batch.n = 1;
  inst.batch.feature_dim = 1;
  inst.batch.features = {0.0};
  inst.batch.gt_depth = {10.0};
  inst.batch.outlier_flag = {0};
  inst.outputs.depth = {12.0};
  inst.outputs.cls = {0.5};
  inst.outputs.ctr = {0.5};

  auto bce_path = [&](double dq_pred) {
    inst.outputs.dq = {dq_pred};
    return std::abs(strategy_loss(cfg, inst.batch, inst.outputs).grads_depth[0] - 1.0);
  };
  CHECK(bce_path(0.9) > bce_path(0.5));
  CHECK(bce_path(0.99) > bce_path(0.9));
}

TEST_CASE("shape and weight validation") {
  StrategyConfig cfg;
  Instance inst;
  inst.batch.n = 2;
  inst.batch.feature_dim = 1;
  inst.batch.features = {0, 0};
  inst.batch.gt_depth = {5, 5};
  inst.batch.outlier_flag = {0, 0};
  inst.outputs.depth = {5};  // wrong length
  inst.outputs.dq = {0.5, 0.5};
  inst.outputs.cls = {0.5, 0.5};
  inst.outputs.ctr = {0.5, 0.5};
  CHECK_THROWS_AS(strategy_loss(cfg, inst.batch, inst.outputs), std::invalid_argument);

  cfg.depth_loss_weight = -1.0;
  CHECK_THROWS_AS(validate(cfg), std::domain_error);
}

TEST_CASE("loss weights scale the reported gradients") {
  Rng rng(31);
  const auto inst = random_instance(rng, 8);
  StrategyConfig cfg;
  cfg.strategy = Strategy::kGmm;
  cfg.depth_loss_weight = 0.2;  // warm-up style depth weight
  cfg.dq_loss_weight = 2.0;
  const auto detached = detach_terms(cfg, inst.batch, inst.outputs);
  const auto report = strategy_loss(cfg, inst.batch, inst.outputs);
  const double numeric = central_diff(
      [&](double x) {
        HeadOutputs moved = inst.outputs;
        moved.depth[3] = x;
        return strategy_total(cfg, inst.batch, moved, detached);
      },
      inst.outputs.depth[3], 1e-6);
  CHECK(rel_close(report.grads_depth[3], numeric, 1e-5));
}
