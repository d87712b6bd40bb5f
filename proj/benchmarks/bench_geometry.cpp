// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <vector>

#include "depthmine/boxgeom.hpp"
#include "depthmine/eval.hpp"
#include "depthmine/rng.hpp"
#include "depthmine/synth.hpp"

namespace {

using namespace depthmine;

constexpr double kPi = 3.141592653589793238462643383280;

std::vector<Detection> random_dets(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Detection> dets;
  dets.reserve(n);
  for (int i = 0; i < n; ++i) {
    dets.push_back(make_detection(
        Box3D(rng.uniform(-40, 40), rng.uniform(-40, 40), 0, rng.uniform(1, 3),
              rng.uniform(2, 6), 1.5, rng.uniform(-kPi, kPi), 0, 0,
              static_cast<int>(rng.uniform_int(3)), 0),
        rng.uniform01(), rng.uniform01(), rng.uniform01()));
  }
  return dets;
}

void BM_rotated_iou(benchmark::State& state) {
  const auto dets = random_dets(64, 3);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& a = dets[i % dets.size()];
    const auto& b = dets[(i * 7 + 1) % dets.size()];
    benchmark::DoNotOptimize(rotated_iou(a.box, b.box));
    ++i;
  }
}

void BM_nms(benchmark::State& state) {
  const auto dets = random_dets(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nms(dets, 0.5, true));
  }
  state.SetComplexityN(state.range(0));
}

void BM_evaluate(benchmark::State& state) {
  SceneConfig cfg;
  cfg.n_boxes = static_cast<int>(state.range(0));
  cfg.dets_per_box = 4;
  cfg.seed = 5;
  const SynthScene scene = generate_scene(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(scene.dets, scene.gts));
  }
}

}  // namespace

BENCHMARK(BM_rotated_iou);
BENCHMARK(BM_nms)->RangeMultiplier(2)->Range(64, 512)->Complexity();
BENCHMARK(BM_evaluate)->Arg(50)->Arg(200);

BENCHMARK_MAIN();
