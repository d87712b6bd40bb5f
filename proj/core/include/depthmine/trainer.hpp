// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "depthmine/eval.hpp"
#include "depthmine/losses.hpp"
#include "depthmine/model.hpp"
#include "depthmine/synth.hpp"
#include "depthmine/types.hpp"

namespace depthmine {

/// Thrown when training produces a non-finite loss; carries the epoch.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int epoch, const std::string& what)
      : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

struct TrainOptions {
  int epochs = 100;
  double lr = 1e-2;
};

/// One training run. clean_mae_curve[e] is the clean-sample (non-outlier)
/// depth MAE after update e; loss_curve[e] is the total loss entering
/// epoch e. The dq means are taken from a final forward pass.
struct TrainReport {
  Strategy strategy = Strategy::kBaseline;
  std::uint64_t seed = 0;
  double initial_clean_mae = 0.0;
  double final_clean_mae = 0.0;
  std::vector<double> clean_mae_curve;
  std::vector<double> loss_curve;
  double dq_inlier_mean = 0.0;
  double dq_outlier_mean = 0.0;
};

std::string train_report_to_json(const TrainReport& report);

/// Full-batch gradient descent of the configured strategy loss. Entirely
/// deterministic given (model, batch, cfg, options). Throws DivergenceError
/// if the loss goes non-finite.
TrainReport train(ToyModel& model, const SampleBatch& batch,
                  const StrategyConfig& cfg, const TrainOptions& options,
                  std::uint64_t seed_label = 0);

/// Mean clean-sample |predicted - true| depth error; outliers excluded.
double clean_mae(const SampleBatch& batch, const std::vector<double>& depth_pred);

/// A multi-seed, multi-strategy comparison. For each seed the data and the
/// model initialization are identical across strategies, so per-seed
/// comparisons are paired.
struct ExperimentConfig {
  SynthConfig synth;  // synth.seed is overridden per experiment seed
  int hidden_dim = 16;
  TrainOptions train;
  std::vector<Strategy> strategies;
  std::vector<std::uint64_t> seeds;
  QualityParams quality;
  double depth_loss_weight = 1.0;
  double dq_loss_weight = 1.0;
  int jobs = 1;
};

void validate(const ExperimentConfig& cfg);

struct ExperimentCell {
  Strategy strategy = Strategy::kBaseline;
  std::uint64_t seed = 0;
  double final_mae = 0.0;
  double dq_inlier_mean = 0.0;
  double dq_outlier_mean = 0.0;
  std::string error;  // empty on success; training errors do not abort other cells
};

struct StrategySummary {
  Strategy strategy = Strategy::kBaseline;
  int n_ok = 0;
  double mean_final_mae = 0.0;
  double std_final_mae = 0.0;
  double mean_dq_inlier = 0.0;
  double mean_dq_outlier = 0.0;
};

/// Aggregates plus the directional verdicts the comparison is run for.
/// A verdict is only present when both strategies it compares ran.
struct ComparisonReport {
  std::vector<ExperimentCell> cells;
  std::vector<StrategySummary> summaries;
  std::optional<bool> gmm_mae_below_baseline;
  std::optional<bool> mpm_mae_below_baseline;
  std::optional<bool> hard_mae_above_baseline;
  std::optional<bool> gmm_dq_separates_outliers;  // inlier mean - outlier mean >= 0.1
  double gmm_dq_gap = 0.0;
};

/// Runs every (strategy, seed) cell, in parallel when cfg.jobs > 1. Cell
/// results are deterministic and independent of the worker count.
ComparisonReport run_experiment(const ExperimentConfig& cfg);

std::string comparison_to_json(const ComparisonReport& report);
std::string comparison_to_csv(const ComparisonReport& report);

/// Writes comparison.json and comparison.csv into out_dir.
void write_comparison(const std::string& out_dir, const ComparisonReport& report);

/// Trains a model with the given strategy, then turns its predictions on
/// the batch into a synthetic detection scene: one ground-truth box per
/// sample at (lateral, true depth) and one detection at (lateral, predicted
/// depth) carrying the predicted depth quality as s_dq. The returned
/// metrics expose how depth accuracy propagates into mATE and NDS.
struct PipelineResult {
  TrainReport train_report;
  MetricSet metrics;
  std::vector<Box3D> gts;
  std::vector<Detection> dets;
};

PipelineResult run_detection_pipeline(const SynthConfig& synth_cfg, int hidden_dim,
                                      const StrategyConfig& strategy_cfg,
                                      const TrainOptions& options,
                                      std::uint64_t seed, int n_classes = 3);

}  // namespace depthmine
