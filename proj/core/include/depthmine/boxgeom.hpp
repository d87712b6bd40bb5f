// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "depthmine/types.hpp"

namespace depthmine {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Bird's-eye-view footprint of a box: 4 corners, counter-clockwise.
/// Length runs along the heading, width across it.
struct BevPolygon {
  std::array<Point2, 4> corners;
};

BevPolygon bev_polygon(const Box3D& box);

/// Signed shoelace area of a simple polygon (positive when CCW).
double polygon_area(const std::vector<Point2>& polygon);

/// Intersection-over-union of the BEV footprints, computed by clipping one
/// footprint against the other (Sutherland-Hodgman) and integrating the
/// area with the shoelace formula. Height is deliberately ignored.
/// Throws std::domain_error for degenerate (zero-area) boxes.
double rotated_iou(const Box3D& a, const Box3D& b);

/// Depth-aware score fusion: s = sqrt(s_cls * s_ctr * s_dq), all three
/// factors weighted equally. Zero if any factor is zero. Inputs outside
/// [0,1] raise std::domain_error.
double fused_score(double s_cls, double s_ctr, double s_dq);

/// Builds a Detection with the canonical fused score.
Detection make_detection(const Box3D& box, double s_cls, double s_ctr, double s_dq);

/// Recomputes the canonical fusion and throws if det.fused disagrees.
void assert_fused_consistent(const Detection& det, double tol = 1e-12);

/// Score compositions for the NMS/ranking ablation. kClsCtrDq is the
/// canonical depth-aware fusion; the others drop factors.
enum class ScoreMode { kCls, kClsCtr, kClsCtrDq };

const char* score_mode_name(ScoreMode mode);
ScoreMode score_mode_from_name(const std::string& name);

double mode_score(const Detection& det, ScoreMode mode);

/// Overwrites each detection's fused field with the mode score so ranking
/// and NMS downstream see the composition under test.
void apply_score_mode(std::vector<Detection>& dets, ScoreMode mode);

/// Greedy NMS: sort by fused score descending (ties keep input order),
/// keep, and suppress remaining boxes whose rotated BEV IoU with a kept box
/// exceeds iou_thr. With per_class set, only same-class boxes suppress each
/// other. Returns kept indices in selection (score) order.
std::vector<std::size_t> nms(const std::vector<Detection>& dets, double iou_thr,
                             bool per_class);

}  // namespace depthmine
