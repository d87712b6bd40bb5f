// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include "depthmine/boxgeom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace depthmine {

BevPolygon bev_polygon(const Box3D& box) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = 0.5 * box.l;  // along heading
  const double hw = 0.5 * box.w;  // across heading
  // CCW in the (x, y) plane.
  const std::array<Point2, 4> local{{{+hl, +hw}, {-hl, +hw}, {-hl, -hw}, {+hl, -hw}}};
  BevPolygon poly;
  for (std::size_t i = 0; i < 4; ++i) {
    poly.corners[i] = {box.x + c * local[i].x - s * local[i].y,
                       box.y + s * local[i].x + c * local[i].y};
  }
  return poly;
}

double polygon_area(const std::vector<Point2>& polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice_area = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = polygon[i];
    const Point2& q = polygon[(i + 1) % n];
    twice_area += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice_area;
}

namespace {

double cross(const Point2& origin, const Point2& a, const Point2& b) {
  return (a.x - origin.x) * (b.y - origin.y) - (b.x - origin.x) * (a.y - origin.y);
}

// Clips a convex polygon to the half-plane left of edge a->b.
std::vector<Point2> clip_half_plane(const std::vector<Point2>& polygon,
                                    const Point2& a, const Point2& b) {
  std::vector<Point2> clipped;
  clipped.reserve(polygon.size() + 1);
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& cur = polygon[i];
    const Point2& nxt = polygon[(i + 1) % n];
    const double side_cur = cross(a, b, cur);
    const double side_nxt = cross(a, b, nxt);
    if (side_cur >= 0.0) clipped.push_back(cur);
    if ((side_cur > 0.0 && side_nxt < 0.0) || (side_cur < 0.0 && side_nxt > 0.0)) {
      const double t = side_cur / (side_cur - side_nxt);
      clipped.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
    }
  }
  return clipped;
}

double intersection_area(const BevPolygon& a, const BevPolygon& b) {
  std::vector<Point2> poly(a.corners.begin(), a.corners.end());
  for (std::size_t i = 0; i < 4 && !poly.empty(); ++i) {
    poly = clip_half_plane(poly, b.corners[i], b.corners[(i + 1) % 4]);
  }
  return poly.size() < 3 ? 0.0 : std::abs(polygon_area(poly));
}

}  // namespace

double rotated_iou(const Box3D& a, const Box3D& b) {
  validate(a);
  validate(b);
  const double area_a = a.w * a.l;
  const double area_b = b.w * b.l;
  if (!(area_a > 0.0) || !(area_b > 0.0)) {
    throw std::domain_error("rotated_iou: degenerate box footprint");
  }
  const double inter = intersection_area(bev_polygon(a), bev_polygon(b));
  const double uni = area_a + area_b - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double fused_score(double s_cls, double s_ctr, double s_dq) {
  for (double s : {s_cls, s_ctr, s_dq}) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw std::domain_error("fused_score: inputs must lie in [0,1]");
    }
  }
  return std::sqrt(s_cls * s_ctr * s_dq);
}

Detection make_detection(const Box3D& box, double s_cls, double s_ctr, double s_dq) {
  Detection det;
  det.box = box;
  det.s_cls = s_cls;
  det.s_ctr = s_ctr;
  det.s_dq = s_dq;
  det.fused = fused_score(s_cls, s_ctr, s_dq);
  return det;
}

void assert_fused_consistent(const Detection& det, double tol) {
  const double expected = fused_score(det.s_cls, det.s_ctr, det.s_dq);
  if (std::abs(det.fused - expected) > tol) {
    throw std::domain_error("Detection: fused score does not match sqrt(s_cls*s_ctr*s_dq)");
  }
}

const char* score_mode_name(ScoreMode mode) {
  switch (mode) {
    case ScoreMode::kCls: return "cls";
    case ScoreMode::kClsCtr: return "cls_ctr";
    case ScoreMode::kClsCtrDq: return "cls_ctr_dq";
  }
  return "unknown";
}

ScoreMode score_mode_from_name(const std::string& name) {
  if (name == "cls") return ScoreMode::kCls;
  if (name == "cls_ctr") return ScoreMode::kClsCtr;
  if (name == "cls_ctr_dq") return ScoreMode::kClsCtrDq;
  throw std::invalid_argument("unknown score mode: " + name);
}

double mode_score(const Detection& det, ScoreMode mode) {
  switch (mode) {
    case ScoreMode::kCls:
      return det.s_cls;
    case ScoreMode::kClsCtr:
      return std::sqrt(det.s_cls * det.s_ctr);
    case ScoreMode::kClsCtrDq:
      return fused_score(det.s_cls, det.s_ctr, det.s_dq);
  }
  throw std::invalid_argument("mode_score: unknown mode");
}

void apply_score_mode(std::vector<Detection>& dets, ScoreMode mode) {
  for (auto& det : dets) det.fused = mode_score(det, mode);
}

std::vector<std::size_t> nms(const std::vector<Detection>& dets, double iou_thr,
                             bool per_class) {
  if (!(iou_thr >= 0.0 && iou_thr <= 1.0)) {
    throw std::domain_error("nms: iou_thr must lie in [0,1]");
  }
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return dets[i].fused > dets[j].fused;
  });

  std::vector<std::size_t> kept;
  std::vector<bool> suppressed(dets.size(), false);
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t i = order[oi];
    if (suppressed[i]) continue;
    kept.push_back(i);
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const std::size_t j = order[oj];
      if (suppressed[j]) continue;
      if (per_class && dets[i].box.class_id != dets[j].box.class_id) continue;
      if (rotated_iou(dets[i].box, dets[j].box) > iou_thr) suppressed[j] = true;
    }
  }
  return kept;
}

}  // namespace depthmine
