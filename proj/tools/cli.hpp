// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "depthmine/trainer.hpp"

namespace depthmine::cli {

// Exit codes, documented in the README. Failures also emit a one-line JSON
// error record on stderr: {"error":{"code":..,"kind":..,"message":..}}.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;        // unknown subcommand or bad flags
inline constexpr int kExitConfig = 3;       // config schema violations
inline constexpr int kExitMissingFile = 4;  // missing or unreadable input
inline constexpr int kExitRuntime = 5;      // computation or data failure

/// Everything a config file can pin. Absent fields keep these defaults,
/// which are the frozen values of the reference experiment
/// (configs/default_experiment.json spells them out).
struct RunConfig {
  ExperimentConfig experiment;
  double nms_iou_thr = 0.5;
  bool nms_per_class = true;
  std::string nms_score_mode = "cls_ctr_dq";
  std::vector<double> ap_thresholds{0.5, 1.0, 2.0, 4.0};
  double tp_threshold = 2.0;
};

RunConfig default_run_config();

/// Result of validating a config file. All violations are collected in one
/// pass rather than stopping at the first.
struct ConfigValidation {
  RunConfig config;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

ConfigValidation validate_config(const std::string& path);

/// Runs one CLI invocation. argv[0] is the program name. Returns the exit
/// code; all output goes through the provided streams.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace depthmine::cli
