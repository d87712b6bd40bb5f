// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "depthmine/boxgeom.hpp"
#include "depthmine/eval.hpp"
#include "depthmine/quality.hpp"
#include "depthmine/serialize.hpp"
#include "depthmine/synth.hpp"

namespace depthmine::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError {
  int code;
  std::string kind;
  std::string message;
};

void error_record(std::ostream& err, int code, const std::string& kind,
                  const std::string& message,
                  const std::vector<std::string>& details = {}) {
  json rec;
  rec["error"]["code"] = code;
  rec["error"]["kind"] = kind;
  rec["error"]["message"] = message;
  if (!details.empty()) rec["error"]["errors"] = details;
  err << rec.dump() << '\n';
}

void require_readable(const std::string& path) {
  if (!fs::exists(path) || !std::ifstream(path)) {
    throw CliError{kExitMissingFile, "missing_file", "cannot read " + path};
  }
}

std::string resolve_out(const std::string& flag_value, const std::string& default_name) {
  if (!flag_value.empty()) return flag_value;
  if (const char* dir = std::getenv("DEPTHMINE_OUT_DIR"); dir != nullptr && *dir != '\0') {
    return (fs::path(dir) / default_name).string();
  }
  throw CliError{kExitUsage, "usage",
                 "--out not given and DEPTHMINE_OUT_DIR is not set"};
}

void ensure_parent_dir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

}  // namespace

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.experiment.synth.n_samples = 4000;
  cfg.experiment.synth.feature_dim = 6;
  cfg.experiment.synth.outlier_fraction = 0.25;
  cfg.experiment.synth.depth_min = 1.0;
  cfg.experiment.synth.depth_max = 60.0;
  cfg.experiment.synth.noise_sigma = 0.2;
  cfg.experiment.synth.outlier_identifiable = true;
  cfg.experiment.hidden_dim = 16;
  cfg.experiment.train.epochs = 2000;
  cfg.experiment.train.lr = 5e-3;
  cfg.experiment.strategies = {Strategy::kBaseline, Strategy::kSubjectiveEasy,
                               Strategy::kHard, Strategy::kMpm, Strategy::kGmm};
  cfg.experiment.seeds = {1, 2, 3, 4, 5};
  cfg.experiment.quality = {QualityMetric::kRelative, 2.0};
  cfg.experiment.depth_loss_weight = 1.0;
  cfg.experiment.dq_loss_weight = 2.0;
  cfg.experiment.jobs = 1;
  return cfg;
}

namespace {

// Collects every violation instead of stopping at the first one.
class ConfigReader {
 public:
  explicit ConfigReader(std::vector<std::string>& errors) : errors_(errors) {}

  void complain(const std::string& path, const std::string& message) {
    errors_.push_back(path + ": " + message);
  }

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
      (void)value;
      bool known = false;
      for (const char* name : allowed) {
        if (key == name) { known = true; break; }
      }
      if (!known) complain(path.empty() ? key : path + "." + key, "unknown field");
    }
  }

  template <typename T, typename Pred>
  void read(const json& obj, const char* key, const std::string& path, T& dst,
            Pred pred, const std::string& constraint) {
    if (!obj.contains(key)) return;
    const std::string field = path + "." + key;
    try {
      T value = obj.at(key).get<T>();
      if (!pred(value)) {
        complain(field, constraint);
        return;
      }
      dst = value;
    } catch (const json::exception&) {
      complain(field, "wrong type");
    }
  }

 private:
  std::vector<std::string>& errors_;
};

}  // namespace

ConfigValidation validate_config(const std::string& path) {
  ConfigValidation result;
  result.config = default_run_config();

  std::ifstream in(path);
  if (!in) {
    result.errors.push_back(path + ": cannot open file");
    return result;
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    result.errors.push_back(path + ": malformed JSON: " + e.what());
    return result;
  }
  if (!doc.is_object()) {
    result.errors.push_back(path + ": top-level value must be an object");
    return result;
  }

  ConfigReader reader(result.errors);
  reader.check_keys(doc, "", {"experiment", "nms", "eval"});
  auto& cfg = result.config;

  if (doc.contains("experiment")) {
    const json& exp = doc.at("experiment");
    if (!exp.is_object()) {
      reader.complain("experiment", "must be an object");
    } else {
      reader.check_keys(exp, "experiment",
                        {"n_samples", "feature_dim", "outlier_fraction", "depth_range",
                         "noise_sigma", "outlier_identifiable", "hidden_dim", "epochs",
                         "lr", "seeds", "strategies", "quality", "depth_loss_weight",
                         "dq_loss_weight", "jobs"});
      auto positive_int = [](int v) { return v >= 1; };
      reader.read(exp, "n_samples", "experiment", cfg.experiment.synth.n_samples,
                  positive_int, "must be >= 1");
      reader.read(exp, "feature_dim", "experiment", cfg.experiment.synth.feature_dim,
                  positive_int, "must be >= 1");
      reader.read(exp, "outlier_fraction", "experiment",
                  cfg.experiment.synth.outlier_fraction,
                  [](double v) { return v >= 0.0 && v < 1.0; }, "must lie in [0, 1)");
      if (exp.contains("depth_range")) {
        std::vector<double> range;
        try {
          range = exp.at("depth_range").get<std::vector<double>>();
        } catch (const json::exception&) {
          reader.complain("experiment.depth_range", "wrong type");
        }
        if (range.size() == 2 && range[0] > 0.0 && range[0] < range[1]) {
          cfg.experiment.synth.depth_min = range[0];
          cfg.experiment.synth.depth_max = range[1];
        } else if (!range.empty() || exp.at("depth_range").is_array()) {
          reader.complain("experiment.depth_range",
                          "must be [min, max] with 0 < min < max");
        }
      }
      reader.read(exp, "noise_sigma", "experiment", cfg.experiment.synth.noise_sigma,
                  [](double v) { return v >= 0.0; }, "must be >= 0");
      reader.read(exp, "outlier_identifiable", "experiment",
                  cfg.experiment.synth.outlier_identifiable,
                  [](bool) { return true; }, "");
      reader.read(exp, "hidden_dim", "experiment", cfg.experiment.hidden_dim,
                  positive_int, "must be >= 1");
      reader.read(exp, "epochs", "experiment", cfg.experiment.train.epochs,
                  positive_int, "must be >= 1");
      reader.read(exp, "lr", "experiment", cfg.experiment.train.lr,
                  [](double v) { return v > 0.0; }, "must be > 0");
      reader.read(exp, "jobs", "experiment", cfg.experiment.jobs, positive_int,
                  "must be >= 1");
      reader.read(exp, "depth_loss_weight", "experiment",
                  cfg.experiment.depth_loss_weight,
                  [](double v) { return v >= 0.0; }, "must be >= 0");
      reader.read(exp, "dq_loss_weight", "experiment", cfg.experiment.dq_loss_weight,
                  [](double v) { return v >= 0.0; }, "must be >= 0");
      if (exp.contains("seeds")) {
        try {
          auto seeds = exp.at("seeds").get<std::vector<std::uint64_t>>();
          if (seeds.empty()) {
            reader.complain("experiment.seeds", "must not be empty");
          } else {
            cfg.experiment.seeds = std::move(seeds);
          }
        } catch (const json::exception&) {
          reader.complain("experiment.seeds", "must be an array of nonnegative integers");
        }
      }
      if (exp.contains("strategies")) {
        std::vector<Strategy> strategies;
        bool bad = false;
        if (!exp.at("strategies").is_array() || exp.at("strategies").empty()) {
          reader.complain("experiment.strategies", "must be a nonempty array");
          bad = true;
        } else {
          for (const auto& item : exp.at("strategies")) {
            try {
              strategies.push_back(strategy_from_name(item.get<std::string>()));
            } catch (const std::exception&) {
              reader.complain("experiment.strategies",
                              "unknown strategy " + item.dump());
              bad = true;
            }
          }
        }
        if (!bad) cfg.experiment.strategies = std::move(strategies);
      }
      if (exp.contains("quality")) {
        const json& quality = exp.at("quality");
        if (!quality.is_object()) {
          reader.complain("experiment.quality", "must be an object");
        } else {
          reader.check_keys(quality, "experiment.quality", {"metric", "beta"});
          if (quality.contains("metric")) {
            try {
              cfg.experiment.quality.metric =
                  quality_metric_from_name(quality.at("metric").get<std::string>());
            } catch (const std::exception&) {
              reader.complain("experiment.quality.metric",
                              "must be \"relative\" or \"gaussian\"");
            }
          }
          reader.read(quality, "beta", "experiment.quality", cfg.experiment.quality.beta,
                      [](double v) { return v > 0.0; }, "must be > 0");
        }
      }
    }
  }

  if (doc.contains("nms")) {
    const json& nms_cfg = doc.at("nms");
    if (!nms_cfg.is_object()) {
      reader.complain("nms", "must be an object");
    } else {
      reader.check_keys(nms_cfg, "nms", {"iou_thr", "per_class", "score_mode"});
      reader.read(nms_cfg, "iou_thr", "nms", cfg.nms_iou_thr,
                  [](double v) { return v >= 0.0 && v <= 1.0; }, "must lie in [0, 1]");
      reader.read(nms_cfg, "per_class", "nms", cfg.nms_per_class,
                  [](bool) { return true; }, "");
      if (nms_cfg.contains("score_mode")) {
        try {
          score_mode_from_name(nms_cfg.at("score_mode").get<std::string>());
          cfg.nms_score_mode = nms_cfg.at("score_mode").get<std::string>();
        } catch (const std::exception&) {
          reader.complain("nms.score_mode", "must be cls, cls_ctr or cls_ctr_dq");
        }
      }
    }
  }

  if (doc.contains("eval")) {
    const json& eval_cfg = doc.at("eval");
    if (!eval_cfg.is_object()) {
      reader.complain("eval", "must be an object");
    } else {
      reader.check_keys(eval_cfg, "eval", {"ap_thresholds", "tp_threshold"});
      if (eval_cfg.contains("ap_thresholds")) {
        try {
          auto thresholds = eval_cfg.at("ap_thresholds").get<std::vector<double>>();
          bool ok = !thresholds.empty();
          for (double t : thresholds) ok = ok && t > 0.0;
          if (ok) {
            cfg.ap_thresholds = std::move(thresholds);
          } else {
            reader.complain("eval.ap_thresholds", "must be a nonempty array of positive reals");
          }
        } catch (const json::exception&) {
          reader.complain("eval.ap_thresholds", "wrong type");
        }
      }
      reader.read(eval_cfg, "tp_threshold", "eval", cfg.tp_threshold,
                  [](double v) { return v > 0.0; }, "must be > 0");
    }
  }

  return result;
}

namespace {

int run_gen_batch(const SynthConfig& cfg, const std::string& out_path,
                  std::ostream& out) {
  const SampleBatch batch = generate_regression(cfg);
  ensure_parent_dir(out_path);
  write_batch_jsonl(out_path, batch);
  int outliers = 0;
  for (auto flag : batch.outlier_flag) outliers += flag;
  out << "wrote " << batch.n << " samples (" << outliers << " outliers) to "
      << out_path << '\n';
  return kExitOk;
}

int run_gen_scene(const SceneConfig& cfg, const std::string& gts_path,
                  const std::string& dets_path, std::ostream& out) {
  const SynthScene scene = generate_scene(cfg);
  ensure_parent_dir(gts_path);
  ensure_parent_dir(dets_path);
  write_boxes_jsonl(gts_path, scene.gts);
  write_detections_jsonl(dets_path, scene.dets);
  out << "wrote " << scene.gts.size() << " ground-truth boxes to " << gts_path
      << " and " << scene.dets.size() << " detections to " << dets_path << '\n';
  return kExitOk;
}

int run_curves(const std::vector<double>& betas, double max_err, int steps,
               const std::string& metric_name, const std::string& out_path,
               std::ostream& out) {
  if (betas.empty()) throw CliError{kExitUsage, "usage", "--betas must not be empty"};
  if (!(max_err > 0.0)) throw CliError{kExitUsage, "usage", "--max-err must be > 0"};
  if (steps < 2) throw CliError{kExitUsage, "usage", "--steps must be >= 2"};
  const QualityMetric metric = quality_metric_from_name(metric_name);
  std::vector<QualityParams> params;
  params.reserve(betas.size());
  for (double beta : betas) params.push_back({metric, beta});
  std::vector<double> grid(steps);
  for (int i = 0; i < steps; ++i) grid[i] = max_err * i / (steps - 1);
  const auto table = dq_curve(params, grid);
  ensure_parent_dir(out_path);
  write_text_atomic(out_path, dq_curve_csv(table));
  out << "wrote " << table.size() << " rows to " << out_path << '\n';
  return kExitOk;
}

int run_experiment_cmd(const std::string& config_path, const std::string& out_dir,
                       const std::vector<std::uint64_t>& seed_override,
                       int jobs_override, bool verbose, std::ostream& out,
                       std::ostream& err) {
  RunConfig run_cfg = default_run_config();
  if (!config_path.empty()) {
    require_readable(config_path);
    ConfigValidation validation = validate_config(config_path);
    if (!validation.ok()) {
      for (const auto& message : validation.errors) err << message << '\n';
      throw CliError{kExitConfig, "config",
                     std::to_string(validation.errors.size()) + " validation error(s) in " +
                         config_path};
    }
    run_cfg = std::move(validation.config);
  }
  ExperimentConfig cfg = run_cfg.experiment;
  if (!seed_override.empty()) cfg.seeds = seed_override;
  if (jobs_override > 0) cfg.jobs = jobs_override;
  if (verbose) {
    err << "running " << cfg.strategies.size() << " strategies x " << cfg.seeds.size()
        << " seeds, " << cfg.train.epochs << " epochs, jobs=" << cfg.jobs << '\n';
  }

  const ComparisonReport report = run_experiment(cfg);
  write_comparison(out_dir, report);

  for (const auto& summary : report.summaries) {
    out << strategy_name(summary.strategy) << ": mean final clean MAE "
        << summary.mean_final_mae << " (std " << summary.std_final_mae << ", n="
        << summary.n_ok << ")\n";
  }
  auto show = [&](const char* name, const std::optional<bool>& verdict) {
    if (verdict.has_value()) out << name << ": " << (*verdict ? "true" : "false") << '\n';
  };
  show("gmm_mae_below_baseline", report.gmm_mae_below_baseline);
  show("mpm_mae_below_baseline", report.mpm_mae_below_baseline);
  show("hard_mae_above_baseline", report.hard_mae_above_baseline);
  show("gmm_dq_separates_outliers", report.gmm_dq_separates_outliers);
  out << "reports written to " << out_dir << '\n';
  return kExitOk;
}

int run_nms_cmd(const std::string& dets_path, const std::string& out_path,
                double iou_thr, const std::string& mode_name, bool global,
                std::ostream& out) {
  require_readable(dets_path);
  auto dets = read_detections_jsonl(dets_path);
  apply_score_mode(dets, score_mode_from_name(mode_name));
  const auto kept_indices = nms(dets, iou_thr, !global);
  std::vector<Detection> kept;
  kept.reserve(kept_indices.size());
  for (std::size_t index : kept_indices) kept.push_back(dets[index]);
  ensure_parent_dir(out_path);
  write_detections_jsonl(out_path, kept);
  out << "kept " << kept.size() << " of " << dets.size() << " detections -> "
      << out_path << '\n';
  return kExitOk;
}

int run_eval_cmd(const std::string& dets_path, const std::string& gts_path,
                 const std::string& out_path, const std::string& per_class_path,
                 std::ostream& out) {
  require_readable(dets_path);
  require_readable(gts_path);
  const auto dets = read_detections_jsonl(dets_path);
  const auto gts = read_boxes_jsonl(gts_path);
  const MetricSet metrics = evaluate(dets, gts);
  ensure_parent_dir(out_path);
  write_text_atomic(out_path, metricset_to_json(metrics) + "\n");
  if (!per_class_path.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "class_id,ate\n";
    for (const auto& [class_id, ate] : per_class_ate(dets, gts)) {
      csv << class_id << ',' << ate << '\n';
    }
    ensure_parent_dir(per_class_path);
    write_text_atomic(per_class_path, csv.str());
  }
  out << metricset_to_json(metrics) << '\n';
  return kExitOk;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"synthetic depth-sample mining experiments"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate synthetic data");
  gen->require_subcommand(1);
  SynthConfig batch_cfg = default_run_config().experiment.synth;
  std::string batch_out;
  auto* gen_batch = gen->add_subcommand("batch", "regression batch as JSON lines");
  gen_batch->add_option("--n", batch_cfg.n_samples, "sample count");
  gen_batch->add_option("--features", batch_cfg.feature_dim, "feature dimension");
  gen_batch->add_option("--outlier-fraction", batch_cfg.outlier_fraction,
                        "fraction of outlier rows, in [0,1)");
  gen_batch->add_option("--depth-min", batch_cfg.depth_min, "depth range lower bound, m");
  gen_batch->add_option("--depth-max", batch_cfg.depth_max, "depth range upper bound, m");
  gen_batch->add_option("--noise-sigma", batch_cfg.noise_sigma, "inlier depth noise, m");
  gen_batch->add_flag("!--no-marker", batch_cfg.outlier_identifiable,
                      "do not mark outliers in the last feature");
  gen_batch->add_option("--seed", batch_cfg.seed, "generator seed");
  gen_batch->add_option("--out", batch_out, "output .jsonl path");

  SceneConfig scene_cfg;
  std::string scene_gts_out, scene_dets_out;
  auto* gen_scene = gen->add_subcommand("scene", "3D scene with duplicate detections");
  gen_scene->add_option("--boxes", scene_cfg.n_boxes, "ground-truth box count");
  gen_scene->add_option("--dups", scene_cfg.dets_per_box, "detections per box");
  gen_scene->add_option("--jitter", scene_cfg.center_jitter, "perturbation scale, m");
  gen_scene->add_option("--classes", scene_cfg.n_classes, "number of classes");
  gen_scene->add_option("--cls-flip-prob", scene_cfg.cls_flip_prob,
                        "chance the best duplicate is denied the top class score");
  gen_scene->add_option("--seed", scene_cfg.seed, "generator seed");
  gen_scene->add_option("--out-gts", scene_gts_out, "ground-truth .jsonl path");
  gen_scene->add_option("--out-dets", scene_dets_out, "detections .jsonl path");

  // curves
  std::vector<double> betas{1.0, 2.0, 3.0};
  double max_err = 1.0;
  int steps = 101;
  std::string curve_metric = "relative";
  std::string curves_out;
  auto* curves = app.add_subcommand("curves", "tabulate quality vs relative error");
  curves->add_option("--betas", betas, "comma-separated beta values")->delimiter(',');
  curves->add_option("--max-err", max_err, "largest relative error");
  curves->add_option("--steps", steps, "grid size including both endpoints");
  curves->add_option("--metric", curve_metric, "relative or gaussian");
  curves->add_option("--out", curves_out, "output .csv path");

  // experiment
  std::string experiment_config, experiment_out;
  std::vector<std::uint64_t> seed_override;
  int jobs_override = 0;
  bool verbose = false;
  auto* experiment = app.add_subcommand("experiment", "multi-seed strategy comparison");
  experiment->add_option("--config", experiment_config, "JSON config path (defaults used when omitted)");
  experiment->add_option("--out", experiment_out, "output directory");
  experiment->add_option("--seeds", seed_override, "comma-separated seed override")->delimiter(',');
  experiment->add_option("--jobs", jobs_override, "parallel cell workers");
  experiment->add_flag("-v,--verbose", verbose, "progress on stderr");

  // nms
  std::string nms_dets, nms_out, nms_mode = "cls_ctr_dq";
  double nms_thr = 0.5;
  bool nms_global = false;
  auto* nms_cmd = app.add_subcommand("nms", "greedy rotated-BEV NMS over detections");
  nms_cmd->add_option("--dets", nms_dets, "input detections .jsonl")->required();
  nms_cmd->add_option("--out", nms_out, "output .jsonl path");
  nms_cmd->add_option("--iou-thr", nms_thr, "suppression IoU threshold");
  nms_cmd->add_option("--score-mode", nms_mode, "cls, cls_ctr or cls_ctr_dq");
  nms_cmd->add_flag("--global", nms_global, "suppress across classes");

  // eval
  std::string eval_dets, eval_gts, eval_out, eval_per_class;
  auto* eval_cmd = app.add_subcommand("eval", "center-distance AP, TP errors and NDS");
  eval_cmd->add_option("--dets", eval_dets, "detections .jsonl")->required();
  eval_cmd->add_option("--gts", eval_gts, "ground-truth .jsonl (boxes or detections)")->required();
  eval_cmd->add_option("--out", eval_out, "metrics .json path");
  eval_cmd->add_option("--per-class", eval_per_class, "optional per-class ATE .csv path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    error_record(err, kExitUsage, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (gen_batch->parsed()) {
      return run_gen_batch(batch_cfg, resolve_out(batch_out, "batch.jsonl"), out);
    }
    if (gen_scene->parsed()) {
      return run_gen_scene(scene_cfg, resolve_out(scene_gts_out, "gts.jsonl"),
                           resolve_out(scene_dets_out, "dets.jsonl"), out);
    }
    if (curves->parsed()) {
      return run_curves(betas, max_err, steps, curve_metric,
                        resolve_out(curves_out, "dq.csv"), out);
    }
    if (experiment->parsed()) {
      return run_experiment_cmd(experiment_config, resolve_out(experiment_out, "runs"),
                                seed_override, jobs_override, verbose, out, err);
    }
    if (nms_cmd->parsed()) {
      return run_nms_cmd(nms_dets, resolve_out(nms_out, "kept.jsonl"), nms_thr,
                         nms_mode, nms_global, out);
    }
    if (eval_cmd->parsed()) {
      return run_eval_cmd(eval_dets, eval_gts, resolve_out(eval_out, "metrics.json"),
                          eval_per_class, out);
    }
  } catch (const CliError& e) {
    error_record(err, e.code, e.kind, e.message);
    return e.code;
  } catch (const std::invalid_argument& e) {
    error_record(err, kExitRuntime, "runtime", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    error_record(err, kExitRuntime, "runtime", e.what());
    return kExitRuntime;
  }
  error_record(err, kExitUsage, "usage", "no subcommand given");
  return kExitUsage;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& arg : args) argv.push_back(arg.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace depthmine::cli
