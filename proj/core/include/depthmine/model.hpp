// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "depthmine/losses.hpp"
#include "depthmine/rng.hpp"
#include "depthmine/types.hpp"

namespace depthmine {

/// A small deterministic multi-head predictor: one shared ReLU hidden layer
/// feeding four affine heads. The depth head is linear; dq, cls and ctr are
/// squashed into (0,1) by a sigmoid. It stands in for a dense detector's
/// prediction heads wherever the mining strategies need something to train.
///
/// The flat parameter layout (used by flatten/unflatten, gradients and
/// checkpoints) is: trunk_w row-major, trunk_b, then for each head in
/// depth/dq/cls/ctr order its weights followed by its bias.
struct ToyModel {
  int feature_dim = 0;
  int hidden_dim = 0;
  std::vector<double> trunk_w;  // [hidden_dim x feature_dim], row-major
  std::vector<double> trunk_b;  // [hidden_dim]
  std::vector<double> depth_w, dq_w, cls_w, ctr_w;  // [hidden_dim] each
  double depth_b = 0.0, dq_b = 0.0, cls_b = 0.0, ctr_b = 0.0;

  std::size_t param_count() const;
  std::vector<double> flatten() const;
  static ToyModel unflatten(int feature_dim, int hidden_dim,
                            const std::vector<double>& params);
};

/// Initializes weights from uniform(-s, s) with s = 1/sqrt(fan_in) and all
/// biases zero. Draw order is fixed (trunk, then depth/dq/cls/ctr weights),
/// so a seed fully determines the parameters.
ToyModel init_model(int feature_dim, int hidden_dim, Rng& rng);

/// All-zero parameters; squashed heads output exactly 0.5. Test helper.
ToyModel zero_model(int feature_dim, int hidden_dim);

HeadOutputs forward(const ToyModel& model, const SampleBatch& batch);

/// Accumulates d(total)/d(parameter) from the per-sample head gradients in
/// the report, in flatten() layout.
std::vector<double> param_gradients(const ToyModel& model,
                                    const SampleBatch& batch,
                                    const LossReport& report);

/// One plain gradient-descent step: parameters -= lr * gradient.
void backward_apply(ToyModel& model, const SampleBatch& batch,
                    const LossReport& report, double lr);

/// Checkpoint round-trip: a JSON object with a shape header and the flat
/// parameter array.
void save_checkpoint(const std::string& path, const ToyModel& model);
ToyModel load_checkpoint(const std::string& path);

}  // namespace depthmine
