// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include "depthmine/mining.hpp"

#include <cmath>
#include <stdexcept>

namespace depthmine {

namespace {
void check_pair(const std::vector<double>& raw, const std::vector<double>& losses) {
  if (raw.size() != losses.size()) {
    throw std::invalid_argument("mining: weight and loss lengths differ");
  }
  for (double w : raw) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::domain_error("mining: weights must be nonnegative and finite");
    }
  }
  for (double l : losses) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw std::domain_error("mining: losses must be nonnegative and finite");
    }
  }
}
}  // namespace

std::vector<double> normalize_weights(const std::vector<double>& raw,
                                      const std::vector<double>& losses) {
  check_pair(raw, losses);
  double loss_sum = 0.0;
  double weighted_sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    loss_sum += losses[i];
    weighted_sum += raw[i] * losses[i];
  }
  if (weighted_sum == 0.0) {
    return std::vector<double>(raw.size(), 1.0);
  }
  const double scale = loss_sum / weighted_sum;
  std::vector<double> normalized(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    normalized[i] = raw[i] * scale;
  }
  return normalized;
}

MiningWeights make_mining_weights(const std::vector<double>& raw,
                                  const std::vector<double>& losses) {
  return {raw, normalize_weights(raw, losses)};
}

double mining_loss(const std::vector<double>& weights,
                   const std::vector<double>& losses) {
  if (weights.size() != losses.size()) {
    throw std::invalid_argument("mining_loss: weight and loss lengths differ");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    total += weights[i] * losses[i];
  }
  return total;
}

}  // namespace depthmine
