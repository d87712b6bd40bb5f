// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "depthmine/rng.hpp"
#include "depthmine/types.hpp"

namespace depthmine::test {

/// Monte-Carlo IoU oracle, independent of the polygon-clipping path: sample
/// points uniformly over the joint bounding box and estimate
/// |A intersect B| / |A union B| as the ratio of hit counts.
inline double mc_rotated_iou(const Box3D& a, const Box3D& b, std::int64_t samples,
                             Rng& rng) {
  struct Frame {
    double cx, cy, cos_yaw, sin_yaw, half_l, half_w;
    bool contains(double px, double py) const {
      const double dx = px - cx;
      const double dy = py - cy;
      const double along = dx * cos_yaw + dy * sin_yaw;
      const double across = -dx * sin_yaw + dy * cos_yaw;
      return std::abs(along) <= half_l && std::abs(across) <= half_w;
    }
  };
  auto frame = [](const Box3D& box) {
    return Frame{box.x, box.y, std::cos(box.yaw), std::sin(box.yaw),
                 0.5 * box.l, 0.5 * box.w};
  };
  const Frame fa = frame(a);
  const Frame fb = frame(b);

  auto radius = [](const Box3D& box) { return 0.5 * std::hypot(box.l, box.w); };
  const double lo_x = std::min(a.x - radius(a), b.x - radius(b));
  const double hi_x = std::max(a.x + radius(a), b.x + radius(b));
  const double lo_y = std::min(a.y - radius(a), b.y - radius(b));
  const double hi_y = std::max(a.y + radius(a), b.y + radius(b));

  std::int64_t both = 0, either = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    const double px = rng.uniform(lo_x, hi_x);
    const double py = rng.uniform(lo_y, hi_y);
    const bool in_a = fa.contains(px, py);
    const bool in_b = fb.contains(px, py);
    both += in_a && in_b;
    either += in_a || in_b;
  }
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace depthmine::test
