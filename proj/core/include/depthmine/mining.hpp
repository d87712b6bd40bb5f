// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace depthmine {

/// Raw mining weights and their loss-conserving normalization.
struct MiningWeights {
  std::vector<double> raw;
  std::vector<double> normalized;
};

/// Rescales raw weights so the weighted loss sum equals the plain sum:
/// w_hat_i = w_i * (sum L) / (sum w L). If sum(w L) is zero the formula is
/// 0/0 and the batch degenerates to uniform weights of 1.
///
/// The result is meant to be used as a constant: gradients flow through the
/// task losses in the weighted sum, never through the normalizer.
std::vector<double> normalize_weights(const std::vector<double>& raw,
                                      const std::vector<double>& losses);

MiningWeights make_mining_weights(const std::vector<double>& raw,
                                  const std::vector<double>& losses);

/// Weighted loss sum: sum_i w_i * L_i.
double mining_loss(const std::vector<double>& weights,
                   const std::vector<double>& losses);

}  // namespace depthmine
