// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "depthmine/types.hpp"

namespace depthmine {

// JSON-lines serialization, one object per line. Field names match the
// domain types: boxes are {"center":[x,y,z],"size":[w,l,h],"yaw":..,
// "velocity":[vx,vy],"class_id":..,"attribute_id":..}; detections wrap a
// box with the score fields s_cls/s_ctr/s_dq/fused. See docs/schemas/.
// Doubles are emitted with shortest round-trip precision, so an
// encode/decode cycle is the identity.

std::string to_json_line(const Box3D& box);
std::string to_json_line(const Detection& det);
Box3D box3d_from_json_line(const std::string& line);
Detection detection_from_json_line(const std::string& line);

void write_boxes_jsonl(const std::string& path, const std::vector<Box3D>& boxes);
void write_detections_jsonl(const std::string& path, const std::vector<Detection>& dets);

/// Reads ground-truth boxes. Lines may be plain boxes or detections; for a
/// detection line the embedded "box" object is taken, so a detections file
/// can double as its own ground truth.
std::vector<Box3D> read_boxes_jsonl(const std::string& path);
std::vector<Detection> read_detections_jsonl(const std::string& path);

/// Regression batches as JSON lines of
/// {"features":[...],"gt_depth":..,"outlier_flag":..}.
void write_batch_jsonl(const std::string& path, const SampleBatch& batch);
SampleBatch read_batch_jsonl(const std::string& path);

/// Writes a whole file through a temp-then-rename cycle so consumers never
/// observe a partially written artifact.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

}  // namespace depthmine
