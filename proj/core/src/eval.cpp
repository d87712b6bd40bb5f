// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include "depthmine/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace depthmine {

namespace {

constexpr double kPi = 3.141592653589793238462643383280;

double center_distance(const Box3D& a, const Box3D& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::vector<std::size_t> score_order(const std::vector<Detection>& dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return dets[i].fused > dets[j].fused;
  });
  return order;
}

}  // namespace

MatchSet match(const std::vector<Detection>& dets, const std::vector<Box3D>& gts,
               double dist_thr) {
  if (!(dist_thr >= 0.0)) {
    throw std::domain_error("match: dist_thr must be >= 0");
  }
  MatchSet result;
  result.dist_thr = dist_thr;
  std::vector<bool> gt_taken(gts.size(), false);

  for (std::size_t det_index : score_order(dets)) {
    const Detection& det = dets[det_index];
    double best_dist = std::numeric_limits<double>::infinity();
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_taken[g] || gts[g].class_id != det.box.class_id) continue;
      const double dist = center_distance(det.box, gts[g]);
      if (dist < dist_thr && dist < best_dist) {
        best_dist = dist;
        best_gt = g;
      }
    }
    if (best_gt < gts.size()) {
      gt_taken[best_gt] = true;
      result.pairs.push_back({det_index, best_gt, best_dist});
    } else {
      result.unmatched_dets.push_back(det_index);
    }
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!gt_taken[g]) result.unmatched_gts.push_back(g);
  }
  return result;
}

double average_precision(const MatchSet& matches, const std::vector<Detection>& dets,
                         std::size_t n_gt) {
  if (n_gt == 0 || dets.empty()) return 0.0;

  std::vector<bool> is_tp(dets.size(), false);
  for (const auto& pair : matches.pairs) is_tp[pair.det_index] = true;

  // Raw operating points after each ranked detection.
  std::vector<double> recall, precision;
  recall.reserve(dets.size());
  precision.reserve(dets.size());
  std::size_t tp = 0, fp = 0;
  for (std::size_t det_index : score_order(dets)) {
    if (is_tp[det_index]) ++tp; else ++fp;
    recall.push_back(static_cast<double>(tp) / static_cast<double>(n_gt));
    precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
  }

  // Interpolate precision onto the 101-point recall grid: constant to the
  // left of the first point, linear between points (an exact grid hit takes
  // the first point at that recall), zero beyond the last.
  const double max_recall = recall.back();
  double clipped_sum = 0.0;
  for (int k = 11; k <= 100; ++k) {
    const double r = k / 100.0;
    double p;
    if (r > max_recall) {
      p = 0.0;
    } else if (r <= recall.front()) {
      p = precision.front();
    } else {
      const auto it = std::lower_bound(recall.begin(), recall.end(), r);
      const std::size_t hi = static_cast<std::size_t>(it - recall.begin());
      if (recall[hi] == r) {
        p = precision[hi];
      } else {
        const std::size_t lo = hi - 1;
        const double t = (r - recall[lo]) / (recall[hi] - recall[lo]);
        p = precision[lo] + t * (precision[hi] - precision[lo]);
      }
    }
    clipped_sum += std::max(0.0, p - 0.1);
  }
  return std::min(1.0, clipped_sum / 90.0 / 0.9);
}

TpErrors tp_errors(const MatchSet& matches, const std::vector<Detection>& dets,
                   const std::vector<Box3D>& gts) {
  if (matches.pairs.empty()) {
    return {1.0, 1.0, 1.0, 1.0, 1.0};
  }
  double ate = 0.0, ase = 0.0, aoe = 0.0, ave = 0.0, aae = 0.0;
  for (const auto& pair : matches.pairs) {
    const Box3D& det = dets[pair.det_index].box;
    const Box3D& gt = gts[pair.gt_index];
    ate += pair.distance;

    double ratio = 1.0;
    ratio *= std::min(det.w, gt.w) / std::max(det.w, gt.w);
    ratio *= std::min(det.l, gt.l) / std::max(det.l, gt.l);
    ratio *= std::min(det.h, gt.h) / std::max(det.h, gt.h);
    ase += 1.0 - ratio;

    double yaw_diff = std::abs(std::remainder(det.yaw - gt.yaw, 2.0 * kPi));
    aoe += std::min(yaw_diff, kPi);

    ave += std::hypot(det.vx - gt.vx, det.vy - gt.vy);
    aae += det.attribute_id == gt.attribute_id ? 0.0 : 1.0;
  }
  const double n = static_cast<double>(matches.pairs.size());
  return {ate / n, ase / n, aoe / n, ave / n, aae / n};
}

double nds(double map, double ate, double ase, double aoe, double ave, double aae) {
  double score = 5.0 * map;
  for (double err : {ate, ase, aoe, ave, aae}) {
    score += 1.0 - std::min(1.0, err);
  }
  return score / 10.0;
}

namespace {

struct ClassSlice {
  std::vector<Detection> dets;
  std::vector<Box3D> gts;
};

std::map<int, ClassSlice> split_by_class(const std::vector<Detection>& dets,
                                         const std::vector<Box3D>& gts) {
  std::map<int, ClassSlice> slices;
  for (const auto& gt : gts) slices[gt.class_id].gts.push_back(gt);
  for (const auto& det : dets) {
    auto it = slices.find(det.box.class_id);
    if (it != slices.end()) it->second.dets.push_back(det);
  }
  return slices;
}

}  // namespace

MetricSet evaluate(const std::vector<Detection>& dets, const std::vector<Box3D>& gts) {
  if (gts.empty()) {
    throw std::invalid_argument("evaluate: ground-truth set is empty");
  }
  const auto slices = split_by_class(dets, gts);

  double ap_sum = 0.0;
  TpErrors err_sum{0.0, 0.0, 0.0, 0.0, 0.0};
  for (const auto& [class_id, slice] : slices) {
    (void)class_id;
    for (double thr : kApDistanceThresholds) {
      ap_sum += average_precision(match(slice.dets, slice.gts, thr), slice.dets,
                                  slice.gts.size());
    }
    const auto tp_set = match(slice.dets, slice.gts, kTpDistanceThreshold);
    const auto errs = tp_errors(tp_set, slice.dets, slice.gts);
    err_sum.ate += errs.ate;
    err_sum.ase += errs.ase;
    err_sum.aoe += errs.aoe;
    err_sum.ave += errs.ave;
    err_sum.aae += errs.aae;
  }

  const double n_classes = static_cast<double>(slices.size());
  MetricSet metrics;
  metrics.map = ap_sum / (n_classes * kApDistanceThresholds.size());
  metrics.mate = err_sum.ate / n_classes;
  metrics.mase = err_sum.ase / n_classes;
  metrics.maoe = err_sum.aoe / n_classes;
  metrics.mave = err_sum.ave / n_classes;
  metrics.maae = err_sum.aae / n_classes;
  metrics.nds = nds(metrics.map, metrics.mate, metrics.mase, metrics.maoe,
                    metrics.mave, metrics.maae);
  return metrics;
}

std::vector<std::pair<int, double>> per_class_ate(const std::vector<Detection>& dets,
                                                  const std::vector<Box3D>& gts) {
  std::vector<std::pair<int, double>> result;
  for (const auto& [class_id, slice] : split_by_class(dets, gts)) {
    const auto matches = match(slice.dets, slice.gts, kTpDistanceThreshold);
    result.emplace_back(class_id, tp_errors(matches, slice.dets, slice.gts).ate);
  }
  return result;
}

std::string metricset_to_json(const MetricSet& metrics) {
  nlohmann::json doc;
  doc["map"] = metrics.map;
  doc["mate"] = metrics.mate;
  doc["mase"] = metrics.mase;
  doc["maoe"] = metrics.maoe;
  doc["mave"] = metrics.mave;
  doc["maae"] = metrics.maae;
  doc["nds"] = metrics.nds;
  return doc.dump();
}

}  // namespace depthmine
