// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>

namespace depthmine::test {

/// Central finite difference of a scalar function.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double step) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

/// Relative closeness with an absolute floor for values near zero.
inline bool rel_close(double a, double b, double rel_tol, double abs_floor = 1e-9) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= std::max(abs_floor, rel_tol * scale);
}

/// Fresh per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("depthmine_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace depthmine::test
