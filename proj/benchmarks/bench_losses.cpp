// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "depthmine/losses.hpp"
#include "depthmine/model.hpp"
#include "depthmine/rng.hpp"
#include "depthmine/synth.hpp"

namespace {

using namespace depthmine;

SampleBatch make_batch(int n) {
  SynthConfig cfg;
  cfg.n_samples = n;
  cfg.feature_dim = 6;
  cfg.outlier_fraction = 0.25;
  cfg.noise_sigma = 0.2;
  cfg.seed = 1;
  return generate_regression(cfg);
}

void BM_strategy_loss(benchmark::State& state, Strategy strategy) {
  const int n = static_cast<int>(state.range(0));
  const SampleBatch batch = make_batch(n);
  Rng rng(2);
  const ToyModel model = init_model(6, 16, rng);
  const HeadOutputs outputs = forward(model, batch);
  StrategyConfig cfg;
  cfg.strategy = strategy;
  for (auto _ : state) {
    auto report = strategy_loss(cfg, batch, outputs);
    benchmark::DoNotOptimize(report.total);
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_train_epoch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SampleBatch batch = make_batch(n);
  Rng rng(2);
  ToyModel model = init_model(6, 16, rng);
  StrategyConfig cfg;
  cfg.strategy = Strategy::kGmm;
  for (auto _ : state) {
    const HeadOutputs outputs = forward(model, batch);
    const LossReport report = strategy_loss(cfg, batch, outputs);
    backward_apply(model, batch, report, 5e-3);
    benchmark::DoNotOptimize(model.trunk_w.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

BENCHMARK_CAPTURE(BM_strategy_loss, baseline, depthmine::Strategy::kBaseline)->Arg(4096);
BENCHMARK_CAPTURE(BM_strategy_loss, mpm, depthmine::Strategy::kMpm)->Arg(4096);
BENCHMARK_CAPTURE(BM_strategy_loss, gmm, depthmine::Strategy::kGmm)->Arg(4096);
BENCHMARK(BM_train_epoch)->RangeMultiplier(4)->Range(256, 4096);
