// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include "depthmine/model.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "depthmine/serialize.hpp"

namespace depthmine {

namespace {

// Sigmoid outputs are pinned away from the exact endpoints so squashed heads
// stay strictly inside (0,1) even for saturated logits.
constexpr double kSquashFloor = 1e-12;

double sigmoid(double z) {
  double s;
  if (z >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    s = e / (1.0 + e);
  }
  if (s < kSquashFloor) s = kSquashFloor;
  if (s > 1.0 - kSquashFloor) s = 1.0 - kSquashFloor;
  return s;
}

void check_dims(const ToyModel& model, const SampleBatch& batch) {
  if (batch.feature_dim != model.feature_dim) {
    throw std::invalid_argument("model: batch feature_dim does not match model");
  }
}

void hidden_pre(const ToyModel& model, const SampleBatch& batch, int row,
                std::vector<double>& pre) {
  pre.resize(model.hidden_dim);
  for (int h = 0; h < model.hidden_dim; ++h) {
    double acc = model.trunk_b[h];
    const double* w = &model.trunk_w[static_cast<std::size_t>(h) * model.feature_dim];
    for (int f = 0; f < model.feature_dim; ++f) {
      acc += w[f] * batch.feature(row, f);
    }
    pre[h] = acc;
  }
}

}  // namespace

std::size_t ToyModel::param_count() const {
  return static_cast<std::size_t>(hidden_dim) * feature_dim + hidden_dim +
         4 * (static_cast<std::size_t>(hidden_dim) + 1);
}

std::vector<double> ToyModel::flatten() const {
  std::vector<double> params;
  params.reserve(param_count());
  params.insert(params.end(), trunk_w.begin(), trunk_w.end());
  params.insert(params.end(), trunk_b.begin(), trunk_b.end());
  params.insert(params.end(), depth_w.begin(), depth_w.end());
  params.push_back(depth_b);
  params.insert(params.end(), dq_w.begin(), dq_w.end());
  params.push_back(dq_b);
  params.insert(params.end(), cls_w.begin(), cls_w.end());
  params.push_back(cls_b);
  params.insert(params.end(), ctr_w.begin(), ctr_w.end());
  params.push_back(ctr_b);
  return params;
}

ToyModel ToyModel::unflatten(int feature_dim, int hidden_dim,
                             const std::vector<double>& params) {
  ToyModel model;
  model.feature_dim = feature_dim;
  model.hidden_dim = hidden_dim;
  if (params.size() != model.param_count()) {
    throw std::invalid_argument("ToyModel::unflatten: parameter count mismatch");
  }
  auto it = params.begin();
  auto take = [&](std::vector<double>& dst, std::size_t count) {
    dst.assign(it, it + static_cast<std::ptrdiff_t>(count));
    it += static_cast<std::ptrdiff_t>(count);
  };
  take(model.trunk_w, static_cast<std::size_t>(hidden_dim) * feature_dim);
  take(model.trunk_b, hidden_dim);
  take(model.depth_w, hidden_dim);
  model.depth_b = *it++;
  take(model.dq_w, hidden_dim);
  model.dq_b = *it++;
  take(model.cls_w, hidden_dim);
  model.cls_b = *it++;
  take(model.ctr_w, hidden_dim);
  model.ctr_b = *it++;
  return model;
}

ToyModel init_model(int feature_dim, int hidden_dim, Rng& rng) {
  if (feature_dim < 1 || hidden_dim < 1) {
    throw std::invalid_argument("init_model: dimensions must be >= 1");
  }
  ToyModel model = zero_model(feature_dim, hidden_dim);
  const double trunk_scale = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  for (auto& w : model.trunk_w) w = rng.uniform(-trunk_scale, trunk_scale);
  const double head_scale = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  for (auto* head : {&model.depth_w, &model.dq_w, &model.cls_w, &model.ctr_w}) {
    for (auto& w : *head) w = rng.uniform(-head_scale, head_scale);
  }
  return model;
}

ToyModel zero_model(int feature_dim, int hidden_dim) {
  if (feature_dim < 1 || hidden_dim < 1) {
    throw std::invalid_argument("zero_model: dimensions must be >= 1");
  }
  ToyModel model;
  model.feature_dim = feature_dim;
  model.hidden_dim = hidden_dim;
  model.trunk_w.assign(static_cast<std::size_t>(hidden_dim) * feature_dim, 0.0);
  model.trunk_b.assign(hidden_dim, 0.0);
  model.depth_w.assign(hidden_dim, 0.0);
  model.dq_w.assign(hidden_dim, 0.0);
  model.cls_w.assign(hidden_dim, 0.0);
  model.ctr_w.assign(hidden_dim, 0.0);
  return model;
}

HeadOutputs forward(const ToyModel& model, const SampleBatch& batch) {
  check_dims(model, batch);
  HeadOutputs out;
  out.depth.resize(batch.n);
  out.dq.resize(batch.n);
  out.cls.resize(batch.n);
  out.ctr.resize(batch.n);
  std::vector<double> pre;
  for (int i = 0; i < batch.n; ++i) {
    hidden_pre(model, batch, i, pre);
    double depth = model.depth_b, dq_z = model.dq_b;
    double cls_z = model.cls_b, ctr_z = model.ctr_b;
    for (int h = 0; h < model.hidden_dim; ++h) {
      const double z = pre[h] > 0.0 ? pre[h] : 0.0;
      depth += model.depth_w[h] * z;
      dq_z += model.dq_w[h] * z;
      cls_z += model.cls_w[h] * z;
      ctr_z += model.ctr_w[h] * z;
    }
    out.depth[i] = depth;
    out.dq[i] = sigmoid(dq_z);
    out.cls[i] = sigmoid(cls_z);
    out.ctr[i] = sigmoid(ctr_z);
  }
  return out;
}

std::vector<double> param_gradients(const ToyModel& model,
                                    const SampleBatch& batch,
                                    const LossReport& report) {
  check_dims(model, batch);
  const auto n = static_cast<std::size_t>(batch.n);
  if (report.grads_depth.size() != n || report.grads_dq.size() != n) {
    throw std::invalid_argument("param_gradients: report length mismatch");
  }

  ToyModel grad = zero_model(model.feature_dim, model.hidden_dim);
  std::vector<double> pre;
  std::vector<double> z(model.hidden_dim);
  for (int i = 0; i < batch.n; ++i) {
    hidden_pre(model, batch, i, pre);
    double dq_z = model.dq_b;
    for (int h = 0; h < model.hidden_dim; ++h) {
      z[h] = pre[h] > 0.0 ? pre[h] : 0.0;
      dq_z += model.dq_w[h] * z[h];
    }
    const double p = sigmoid(dq_z);
    const double g_depth = report.grads_depth[i];
    // Chain through the sigmoid to the dq logit.
    const double g_dq_logit = report.grads_dq[i] * p * (1.0 - p);

    grad.depth_b += g_depth;
    grad.dq_b += g_dq_logit;
    for (int h = 0; h < model.hidden_dim; ++h) {
      grad.depth_w[h] += g_depth * z[h];
      grad.dq_w[h] += g_dq_logit * z[h];
      const double g_hidden = g_depth * model.depth_w[h] + g_dq_logit * model.dq_w[h];
      if (pre[h] > 0.0) {
        grad.trunk_b[h] += g_hidden;
        double* gw = &grad.trunk_w[static_cast<std::size_t>(h) * model.feature_dim];
        for (int f = 0; f < model.feature_dim; ++f) {
          gw[f] += g_hidden * batch.feature(i, f);
        }
      }
    }
  }
  return grad.flatten();
}

void backward_apply(ToyModel& model, const SampleBatch& batch,
                    const LossReport& report, double lr) {
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    throw std::domain_error("backward_apply: lr must be a nonnegative finite real");
  }
  for (double g : report.grads_depth) {
    if (std::isnan(g)) throw std::runtime_error("backward_apply: NaN depth gradient");
  }
  for (double g : report.grads_dq) {
    if (std::isnan(g)) throw std::runtime_error("backward_apply: NaN dq gradient");
  }
  const auto grads = param_gradients(model, batch, report);
  auto params = model.flatten();
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] -= lr * grads[i];
  }
  model = ToyModel::unflatten(model.feature_dim, model.hidden_dim, params);
}

void save_checkpoint(const std::string& path, const ToyModel& model) {
  nlohmann::json doc;
  doc["feature_dim"] = model.feature_dim;
  doc["hidden_dim"] = model.hidden_dim;
  doc["params"] = model.flatten();
  write_text_atomic(path, doc.dump());
}

ToyModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  nlohmann::json doc;
  in >> doc;
  return ToyModel::unflatten(doc.at("feature_dim").get<int>(),
                             doc.at("hidden_dim").get<int>(),
                             doc.at("params").get<std::vector<double>>());
}

}  // namespace depthmine
