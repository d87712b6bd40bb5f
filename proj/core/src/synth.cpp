// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include "depthmine/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "depthmine/rng.hpp"

namespace depthmine {

namespace {
constexpr double kPi = 3.141592653589793238462643383280;

// Sub-stream ids for deriving independent generators from a config seed.
enum Stream : std::uint64_t {
  kFeatureStream = 1,
  kNoiseStream = 2,
  kOutlierDepthStream = 3,
  kOutlierPositionStream = 4,
  kSceneGeometryStream = 5,
  kSceneScoreStream = 6,
};
}  // namespace

void validate(const SynthConfig& cfg) {
  if (cfg.n_samples < 0) throw std::invalid_argument("SynthConfig: n_samples must be >= 0");
  if (cfg.feature_dim < 1) throw std::invalid_argument("SynthConfig: feature_dim must be >= 1");
  if (!(cfg.outlier_fraction >= 0.0 && cfg.outlier_fraction < 1.0)) {
    throw std::domain_error("SynthConfig: outlier_fraction must lie in [0, 1)");
  }
  if (!(cfg.depth_min > 0.0 && cfg.depth_min < cfg.depth_max)) {
    throw std::domain_error("SynthConfig: need 0 < depth_min < depth_max");
  }
  if (!(cfg.noise_sigma >= 0.0)) {
    throw std::domain_error("SynthConfig: noise_sigma must be >= 0");
  }
}

double clean_depth_map(const SynthConfig& cfg, const double* features) {
  double coeff = 1.0;
  double coeff_sum = 0.0;
  double s = 0.0;
  for (int j = 0; j < cfg.feature_dim; ++j, coeff *= 0.5) {
    s += coeff * features[j];
    coeff_sum += coeff;
  }
  s /= coeff_sum;
  const double u = 0.5 + 0.4 * s + 0.1 * std::sin(3.0 * s);
  return cfg.depth_min + (cfg.depth_max - cfg.depth_min) * u;
}

SampleBatch generate_regression(const SynthConfig& cfg) {
  return generate_regression(cfg, cfg.seed);
}

SampleBatch generate_regression(const SynthConfig& cfg,
                                std::uint64_t outlier_stream_seed) {
  validate(cfg);
  const int n = cfg.n_samples;
  const int f = cfg.feature_dim;

  const Rng base(cfg.seed);
  Rng feature_rng = base.child(kFeatureStream);
  Rng noise_rng = base.child(kNoiseStream);
  Rng position_rng = base.child(kOutlierPositionStream);
  Rng outlier_rng = Rng(outlier_stream_seed).child(kOutlierDepthStream);

  SampleBatch batch;
  batch.n = n;
  batch.feature_dim = f;
  batch.features.resize(static_cast<std::size_t>(n) * f);
  batch.gt_depth.resize(n);
  batch.outlier_flag.assign(n, 0);

  for (auto& x : batch.features) x = feature_rng.uniform(-1.0, 1.0);

  const int n_outliers = static_cast<int>(std::llround(cfg.outlier_fraction * n));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  position_rng.shuffle(order);
  for (int i = 0; i < n_outliers; ++i) batch.outlier_flag[order[i]] = 1;

  if (cfg.outlier_identifiable) {
    for (int i = 0; i < n; ++i) {
      batch.features[static_cast<std::size_t>(i) * f + (f - 1)] =
          batch.outlier_flag[i] ? 1.0 : -1.0;
    }
  }

  for (int i = 0; i < n; ++i) {
    // Noise is drawn for every row so the stream position never depends on
    // where the outliers landed.
    const double noise = noise_rng.normal(0.0, cfg.noise_sigma);
    if (batch.outlier_flag[i]) {
      batch.gt_depth[i] = outlier_rng.uniform(cfg.depth_min, cfg.depth_max);
    } else {
      const double clean =
          clean_depth_map(cfg, &batch.features[static_cast<std::size_t>(i) * f]);
      batch.gt_depth[i] = std::clamp(clean + noise, cfg.depth_min, cfg.depth_max);
    }
  }
  return batch;
}

void validate(const SceneConfig& cfg) {
  if (cfg.n_boxes < 0) throw std::invalid_argument("SceneConfig: n_boxes must be >= 0");
  if (cfg.dets_per_box < 1) throw std::invalid_argument("SceneConfig: dets_per_box must be >= 1");
  if (!(cfg.center_jitter >= 0.0)) throw std::domain_error("SceneConfig: center_jitter must be >= 0");
  if (cfg.n_classes < 1) throw std::invalid_argument("SceneConfig: n_classes must be >= 1");
  if (!(cfg.cls_flip_prob >= 0.0 && cfg.cls_flip_prob <= 1.0)) {
    throw std::domain_error("SceneConfig: cls_flip_prob must lie in [0, 1]");
  }
}

SynthScene generate_scene(const SceneConfig& cfg) {
  validate(cfg);
  const Rng base(cfg.seed);
  Rng geom_rng = base.child(kSceneGeometryStream);
  Rng score_rng = base.child(kSceneScoreStream);

  SynthScene scene;
  scene.gts.reserve(cfg.n_boxes);
  scene.dets.reserve(static_cast<std::size_t>(cfg.n_boxes) * cfg.dets_per_box);

  const double jitter = cfg.center_jitter;
  const int m = cfg.dets_per_box;

  for (int i = 0; i < cfg.n_boxes; ++i) {
    // 15 m grid spacing keeps ground-truth footprints disjoint and far
    // beyond the largest matching threshold.
    const double gx = (i % 10) * 15.0 + geom_rng.uniform(-2.0, 2.0);
    const double gy = (i / 10) * 15.0 + geom_rng.uniform(-2.0, 2.0);
    const Box3D gt(gx, gy, 0.0, geom_rng.uniform(1.8, 2.2),
                   geom_rng.uniform(4.2, 5.0), geom_rng.uniform(1.4, 1.8),
                   geom_rng.uniform(-kPi, kPi), geom_rng.uniform(-2.0, 2.0),
                   geom_rng.uniform(-2.0, 2.0), i % cfg.n_classes,
                   static_cast<int>(geom_rng.uniform_int(2)));
    scene.gts.push_back(gt);

    const int best = static_cast<int>(geom_rng.uniform_int(static_cast<std::uint64_t>(m)));
    std::vector<double> cls_scores(m);
    for (auto& s : cls_scores) s = score_rng.uniform(0.5, 0.9);
    if (m >= 2 && score_rng.uniform01() < cfg.cls_flip_prob) {
      // Hand the top class score to a non-best duplicate: class confidence
      // alone must not identify the well-localized candidate.
      int lucky = static_cast<int>(score_rng.uniform_int(static_cast<std::uint64_t>(m - 1)));
      if (lucky >= best) ++lucky;
      cls_scores[lucky] = std::min(0.99, *std::max_element(cls_scores.begin(), cls_scores.end()) + 0.05);
    }

    for (int d = 0; d < m; ++d) {
      const double radius = d == best ? jitter * geom_rng.uniform(0.1, 0.6)
                                      : jitter * geom_rng.uniform(1.0, 2.0);
      const double angle = geom_rng.uniform(0.0, 2.0 * kPi);
      const double yaw_jitter = jitter * geom_rng.normal(0.0, 0.05);
      const double size_scale = std::max(0.5, 1.0 + jitter * geom_rng.normal(0.0, 0.03));
      int attribute = gt.attribute_id;
      if (jitter > 0.0 && score_rng.uniform01() < 0.1) attribute = 1 - attribute;

      const Box3D box(gt.x + radius * std::cos(angle), gt.y + radius * std::sin(angle),
                      gt.z, gt.w * size_scale, gt.l * size_scale, gt.h,
                      normalize_yaw(gt.yaw + yaw_jitter), gt.vx, gt.vy,
                      gt.class_id, attribute);

      const double quality = std::exp(-radius * radius / (2.0 * 0.5 * 0.5));
      Detection det;
      det.box = box;
      det.s_dq = std::clamp(quality + score_rng.normal(0.0, 0.05), 0.01, 0.99);
      det.s_ctr = std::clamp(quality + score_rng.normal(0.0, 0.20), 0.01, 0.99);
      det.s_cls = cls_scores[d];
      det.fused = std::sqrt(det.s_cls * det.s_ctr * det.s_dq);
      scene.dets.push_back(det);
      scene.det_gt_index.push_back(i);
    }
  }
  return scene;
}

}  // namespace depthmine
