// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include "depthmine/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "depthmine/boxgeom.hpp"
#include "depthmine/rng.hpp"
#include "depthmine/serialize.hpp"

namespace depthmine {

using nlohmann::json;

namespace {
// Model initialization derives from the experiment seed through a fixed
// side stream so it never aliases the data streams.
constexpr std::uint64_t kModelInitStream = 101;
}  // namespace

double clean_mae(const SampleBatch& batch, const std::vector<double>& depth_pred) {
  double err_sum = 0.0;
  int count = 0;
  for (int i = 0; i < batch.n; ++i) {
    if (batch.outlier_flag[i]) continue;
    err_sum += std::abs(depth_pred[i] - batch.gt_depth[i]);
    ++count;
  }
  return count == 0 ? 0.0 : err_sum / count;
}

namespace {

void dq_means(const SampleBatch& batch, const HeadOutputs& outputs,
              double& inlier_mean, double& outlier_mean) {
  double in_sum = 0.0, out_sum = 0.0;
  int in_count = 0, out_count = 0;
  for (int i = 0; i < batch.n; ++i) {
    if (batch.outlier_flag[i]) {
      out_sum += outputs.dq[i];
      ++out_count;
    } else {
      in_sum += outputs.dq[i];
      ++in_count;
    }
  }
  inlier_mean = in_count == 0 ? 0.0 : in_sum / in_count;
  outlier_mean = out_count == 0 ? 0.0 : out_sum / out_count;
}

}  // namespace

TrainReport train(ToyModel& model, const SampleBatch& batch,
                  const StrategyConfig& cfg, const TrainOptions& options,
                  std::uint64_t seed_label) {
  if (options.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (!(options.lr >= 0.0) || !std::isfinite(options.lr)) {
    throw std::domain_error("train: lr must be a nonnegative finite real");
  }
  validate(batch);
  validate(cfg);

  TrainReport report;
  report.strategy = cfg.strategy;
  report.seed = seed_label;
  report.clean_mae_curve.reserve(options.epochs);
  report.loss_curve.reserve(options.epochs);
  report.initial_clean_mae = clean_mae(batch, forward(model, batch).depth);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    // Anything that blows up mid-loop (non-finite outputs, NaN gradients)
    // is a divergence of this run, reported with the epoch it died at.
    try {
      const HeadOutputs outputs = forward(model, batch);
      const LossReport loss = strategy_loss(cfg, batch, outputs);
      if (!std::isfinite(loss.total)) {
        throw std::runtime_error("non-finite loss");
      }
      report.loss_curve.push_back(loss.total);
      backward_apply(model, batch, loss, options.lr);
    } catch (const std::exception& e) {
      throw DivergenceError(epoch, "epoch " + std::to_string(epoch) + ": " + e.what());
    }
    report.clean_mae_curve.push_back(clean_mae(batch, forward(model, batch).depth));
  }

  const HeadOutputs final_outputs = forward(model, batch);
  report.final_clean_mae = clean_mae(batch, final_outputs.depth);
  dq_means(batch, final_outputs, report.dq_inlier_mean, report.dq_outlier_mean);
  return report;
}

std::string train_report_to_json(const TrainReport& report) {
  json doc;
  doc["strategy"] = strategy_name(report.strategy);
  doc["seed"] = report.seed;
  doc["initial_clean_mae"] = report.initial_clean_mae;
  doc["final_clean_mae"] = report.final_clean_mae;
  doc["clean_mae_curve"] = report.clean_mae_curve;
  doc["loss_curve"] = report.loss_curve;
  doc["dq_inlier_mean"] = report.dq_inlier_mean;
  doc["dq_outlier_mean"] = report.dq_outlier_mean;
  return doc.dump();
}

void validate(const ExperimentConfig& cfg) {
  validate(cfg.synth);
  validate(cfg.quality);
  if (cfg.hidden_dim < 1) throw std::invalid_argument("ExperimentConfig: hidden_dim must be >= 1");
  if (cfg.train.epochs < 1) throw std::invalid_argument("ExperimentConfig: epochs must be >= 1");
  if (cfg.strategies.empty()) throw std::invalid_argument("ExperimentConfig: no strategies");
  if (cfg.seeds.empty()) throw std::invalid_argument("ExperimentConfig: no seeds");
  if (cfg.jobs < 1) throw std::invalid_argument("ExperimentConfig: jobs must be >= 1");
  if (!(cfg.depth_loss_weight >= 0.0) || !(cfg.dq_loss_weight >= 0.0)) {
    throw std::domain_error("ExperimentConfig: loss weights must be >= 0");
  }
}

namespace {

ExperimentCell run_cell(const ExperimentConfig& cfg, Strategy strategy,
                        std::uint64_t seed) {
  ExperimentCell cell;
  cell.strategy = strategy;
  cell.seed = seed;
  try {
    SynthConfig synth_cfg = cfg.synth;
    synth_cfg.seed = seed;
    const SampleBatch batch = generate_regression(synth_cfg);

    Rng init_rng = Rng(seed).child(kModelInitStream);
    ToyModel model = init_model(cfg.synth.feature_dim, cfg.hidden_dim, init_rng);

    StrategyConfig strategy_cfg;
    strategy_cfg.strategy = strategy;
    strategy_cfg.quality = cfg.quality;
    strategy_cfg.depth_loss_weight = cfg.depth_loss_weight;
    strategy_cfg.dq_loss_weight = cfg.dq_loss_weight;

    const TrainReport report = train(model, batch, strategy_cfg, cfg.train, seed);
    cell.final_mae = report.final_clean_mae;
    cell.dq_inlier_mean = report.dq_inlier_mean;
    cell.dq_outlier_mean = report.dq_outlier_mean;
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

StrategySummary summarize(Strategy strategy, const std::vector<ExperimentCell>& cells) {
  StrategySummary summary;
  summary.strategy = strategy;
  std::vector<double> maes;
  for (const auto& cell : cells) {
    if (cell.strategy != strategy || !cell.error.empty()) continue;
    maes.push_back(cell.final_mae);
    summary.mean_dq_inlier += cell.dq_inlier_mean;
    summary.mean_dq_outlier += cell.dq_outlier_mean;
  }
  summary.n_ok = static_cast<int>(maes.size());
  if (summary.n_ok == 0) return summary;
  summary.mean_final_mae =
      std::accumulate(maes.begin(), maes.end(), 0.0) / summary.n_ok;
  double var = 0.0;
  for (double mae : maes) {
    var += (mae - summary.mean_final_mae) * (mae - summary.mean_final_mae);
  }
  summary.std_final_mae = std::sqrt(var / summary.n_ok);
  summary.mean_dq_inlier /= summary.n_ok;
  summary.mean_dq_outlier /= summary.n_ok;
  return summary;
}

const StrategySummary* find_summary(const ComparisonReport& report, Strategy strategy) {
  for (const auto& summary : report.summaries) {
    if (summary.strategy == strategy && summary.n_ok > 0) return &summary;
  }
  return nullptr;
}

}  // namespace

ComparisonReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);

  struct Task {
    Strategy strategy;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (Strategy strategy : cfg.strategies) {
    for (std::uint64_t seed : cfg.seeds) tasks.push_back({strategy, seed});
  }

  ComparisonReport report;
  report.cells.resize(tasks.size());

  const int jobs = std::min<int>(cfg.jobs, static_cast<int>(tasks.size()));
  if (jobs <= 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      report.cells[t] = run_cell(cfg, tasks[t].strategy, tasks[t].seed);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1)) {
          report.cells[t] = run_cell(cfg, tasks[t].strategy, tasks[t].seed);
        }
      });
    }
    for (auto& worker : workers) worker.join();
  }

  for (Strategy strategy : cfg.strategies) {
    report.summaries.push_back(summarize(strategy, report.cells));
  }

  const auto* baseline = find_summary(report, Strategy::kBaseline);
  const auto* gmm = find_summary(report, Strategy::kGmm);
  const auto* mpm = find_summary(report, Strategy::kMpm);
  const auto* hard = find_summary(report, Strategy::kHard);
  if (baseline && gmm) {
    report.gmm_mae_below_baseline = gmm->mean_final_mae < baseline->mean_final_mae;
  }
  if (baseline && mpm) {
    report.mpm_mae_below_baseline = mpm->mean_final_mae < baseline->mean_final_mae;
  }
  if (baseline && hard) {
    report.hard_mae_above_baseline = hard->mean_final_mae > baseline->mean_final_mae;
  }
  if (gmm) {
    report.gmm_dq_gap = gmm->mean_dq_inlier - gmm->mean_dq_outlier;
    report.gmm_dq_separates_outliers = report.gmm_dq_gap >= 0.1;
  }
  return report;
}

std::string comparison_to_json(const ComparisonReport& report) {
  json doc;
  doc["cells"] = json::array();
  for (const auto& cell : report.cells) {
    json c;
    c["strategy"] = strategy_name(cell.strategy);
    c["seed"] = cell.seed;
    c["final_mae"] = cell.final_mae;
    c["dq_inlier_mean"] = cell.dq_inlier_mean;
    c["dq_outlier_mean"] = cell.dq_outlier_mean;
    c["error"] = cell.error;
    doc["cells"].push_back(std::move(c));
  }
  doc["strategies"] = json::array();
  for (const auto& summary : report.summaries) {
    json s;
    s["strategy"] = strategy_name(summary.strategy);
    s["n_ok"] = summary.n_ok;
    s["mean_final_mae"] = summary.mean_final_mae;
    s["std_final_mae"] = summary.std_final_mae;
    s["mean_dq_inlier"] = summary.mean_dq_inlier;
    s["mean_dq_outlier"] = summary.mean_dq_outlier;
    doc["strategies"].push_back(std::move(s));
  }
  json verdicts;
  auto put = [&](const char* key, const std::optional<bool>& value) {
    if (value.has_value()) verdicts[key] = *value;
  };
  put("gmm_mae_below_baseline", report.gmm_mae_below_baseline);
  put("mpm_mae_below_baseline", report.mpm_mae_below_baseline);
  put("hard_mae_above_baseline", report.hard_mae_above_baseline);
  put("gmm_dq_separates_outliers", report.gmm_dq_separates_outliers);
  if (report.gmm_dq_separates_outliers.has_value()) {
    verdicts["gmm_dq_gap"] = report.gmm_dq_gap;
  }
  doc["verdicts"] = std::move(verdicts);
  return doc.dump(2);
}

std::string comparison_to_csv(const ComparisonReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "strategy,seed,final_mae\n";
  for (const auto& cell : report.cells) {
    if (!cell.error.empty()) continue;
    os << strategy_name(cell.strategy) << ',' << cell.seed << ',' << cell.final_mae << '\n';
  }
  return os.str();
}

void write_comparison(const std::string& out_dir, const ComparisonReport& report) {
  std::filesystem::create_directories(out_dir);
  const auto dir = std::filesystem::path(out_dir);
  write_text_atomic((dir / "comparison.json").string(), comparison_to_json(report));
  write_text_atomic((dir / "comparison.csv").string(), comparison_to_csv(report));
}

PipelineResult run_detection_pipeline(const SynthConfig& synth_cfg, int hidden_dim,
                                      const StrategyConfig& strategy_cfg,
                                      const TrainOptions& options,
                                      std::uint64_t seed, int n_classes) {
  if (n_classes < 1) throw std::invalid_argument("pipeline: n_classes must be >= 1");
  SynthConfig data_cfg = synth_cfg;
  data_cfg.seed = seed;
  const SampleBatch batch = generate_regression(data_cfg);

  Rng init_rng = Rng(seed).child(kModelInitStream);
  ToyModel model = init_model(data_cfg.feature_dim, hidden_dim, init_rng);

  PipelineResult result;
  result.train_report = train(model, batch, strategy_cfg, options, seed);
  const HeadOutputs outputs = forward(model, batch);

  result.gts.reserve(batch.n);
  result.dets.reserve(batch.n);
  for (int i = 0; i < batch.n; ++i) {
    // One lane per sample, 10 m apart, so a detection can only ever match
    // its own ground truth; the center error is then exactly the depth error.
    const double lateral = 10.0 * i;
    const int class_id = i % n_classes;
    result.gts.emplace_back(lateral, batch.gt_depth[i], 0.0, 2.0, 4.5, 1.6, 0.0,
                            0.0, 0.0, class_id, 0);
    result.dets.push_back(make_detection(
        Box3D(lateral, outputs.depth[i], 0.0, 2.0, 4.5, 1.6, 0.0, 0.0, 0.0,
              class_id, 0),
        0.9, 0.9, std::clamp(outputs.dq[i], 0.01, 0.99)));
  }
  result.metrics = evaluate(result.dets, result.gts);
  return result;
}

}  // namespace depthmine
