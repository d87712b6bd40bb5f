// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include "depthmine/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace depthmine {

using nlohmann::json;

namespace {

json box_to_json(const Box3D& box) {
  return json{{"center", {box.x, box.y, box.z}},
              {"size", {box.w, box.l, box.h}},
              {"yaw", box.yaw},
              {"velocity", {box.vx, box.vy}},
              {"class_id", box.class_id},
              {"attribute_id", box.attribute_id}};
}

Box3D box_from_json(const json& doc) {
  const auto& center = doc.at("center");
  const auto& size = doc.at("size");
  const auto& velocity = doc.at("velocity");
  if (center.size() != 3 || size.size() != 3 || velocity.size() != 2) {
    throw std::invalid_argument("box: center/size/velocity have wrong arity");
  }
  return Box3D(center[0].get<double>(), center[1].get<double>(),
               center[2].get<double>(), size[0].get<double>(),
               size[1].get<double>(), size[2].get<double>(),
               doc.at("yaw").get<double>(), velocity[0].get<double>(),
               velocity[1].get<double>(), doc.at("class_id").get<int>(),
               doc.at("attribute_id").get<int>());
}

json parse_line(const std::string& line) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed JSON line: ") + e.what());
  }
}

}  // namespace

std::string to_json_line(const Box3D& box) { return box_to_json(box).dump(); }

std::string to_json_line(const Detection& det) {
  json doc;
  doc["box"] = box_to_json(det.box);
  doc["s_cls"] = det.s_cls;
  doc["s_ctr"] = det.s_ctr;
  doc["s_dq"] = det.s_dq;
  doc["fused"] = det.fused;
  return doc.dump();
}

Box3D box3d_from_json_line(const std::string& line) {
  const json doc = parse_line(line);
  return box_from_json(doc.contains("box") ? doc.at("box") : doc);
}

Detection detection_from_json_line(const std::string& line) {
  const json doc = parse_line(line);
  Detection det;
  det.box = box_from_json(doc.at("box"));
  det.s_cls = doc.at("s_cls").get<double>();
  det.s_ctr = doc.at("s_ctr").get<double>();
  det.s_dq = doc.at("s_dq").get<double>();
  det.fused = doc.at("fused").get<double>();
  validate(det);
  return det;
}

namespace {

template <typename T, typename Parse>
std::vector<T> read_jsonl(const std::string& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<T> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      items.push_back(parse(line));
    } catch (const std::exception& e) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return items;
}

}  // namespace

void write_boxes_jsonl(const std::string& path, const std::vector<Box3D>& boxes) {
  std::ostringstream os;
  for (const auto& box : boxes) os << to_json_line(box) << '\n';
  write_text_atomic(path, os.str());
}

void write_detections_jsonl(const std::string& path, const std::vector<Detection>& dets) {
  std::ostringstream os;
  for (const auto& det : dets) os << to_json_line(det) << '\n';
  write_text_atomic(path, os.str());
}

std::vector<Box3D> read_boxes_jsonl(const std::string& path) {
  return read_jsonl<Box3D>(path, box3d_from_json_line);
}

std::vector<Detection> read_detections_jsonl(const std::string& path) {
  return read_jsonl<Detection>(path, detection_from_json_line);
}

void write_batch_jsonl(const std::string& path, const SampleBatch& batch) {
  std::ostringstream os;
  for (int i = 0; i < batch.n; ++i) {
    json doc;
    auto features = json::array();
    for (int f = 0; f < batch.feature_dim; ++f) features.push_back(batch.feature(i, f));
    doc["features"] = std::move(features);
    doc["gt_depth"] = batch.gt_depth[i];
    doc["outlier_flag"] = batch.outlier_flag[i] != 0;
    os << doc.dump() << '\n';
  }
  write_text_atomic(path, os.str());
}

SampleBatch read_batch_jsonl(const std::string& path) {
  SampleBatch batch;
  const auto rows = read_jsonl<json>(path, parse_line);
  batch.n = static_cast<int>(rows.size());
  for (const auto& doc : rows) {
    const auto features = doc.at("features").get<std::vector<double>>();
    if (batch.feature_dim == 0) {
      batch.feature_dim = static_cast<int>(features.size());
    } else if (static_cast<int>(features.size()) != batch.feature_dim) {
      throw std::invalid_argument(path + ": inconsistent feature arity");
    }
    batch.features.insert(batch.features.end(), features.begin(), features.end());
    batch.gt_depth.push_back(doc.at("gt_depth").get<double>());
    batch.outlier_flag.push_back(doc.at("outlier_flag").get<bool>() ? 1 : 0);
  }
  if (batch.n == 0) batch.feature_dim = 1;
  validate(batch);
  return batch;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace depthmine
