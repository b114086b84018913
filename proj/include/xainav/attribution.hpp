#pragma once
/**
 * @file attribution.hpp
 * @brief Vanilla Gradient explanations of the linear-velocity command and
 * their projection onto scene obstacles.
 *
 * Pipeline per control tick:
 *   1. g   = lidar slice of dv/ds                       (vanilla_gradient)
 *   2. g*  = (|g| - min|g|) / (max|g| - min|g|)          (postprocess)
 *   3. each pooled sector hands g*[j] to the obstacle hit by its
 *      contributing ray; an obstacle keeps the max it receives (map_to_objects)
 *   4. outline width = w_min + score * (w_max - w_min)
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "xainav/geometry.hpp"
#include "xainav/lidar.hpp"
#include "xainav/policy.hpp"
#include "xainav/world.hpp"

namespace xainav {

using SectorScores = std::array<double, kNumSectors>;

struct RawAttribution {
  SectorScores g{};
  std::array<double, kStateDim> full_gradient{};

  std::array<double, 2> goal() const { return {full_gradient[kGoalSlice], full_gradient[kGoalSlice + 1]}; }
};

struct ProcessedAttribution {
  SectorScores g_star{};
};

struct ObjectScore {
  ObstacleId id = 0;
  double score = 0.0;
  bool operator==(const ObjectScore&) const = default;
};

struct ObjectImportance {
  std::vector<ObjectScore> scores;       // scene obstacle order
  std::vector<ObstacleId> ranking;       // descending score, ties by ascending id

  bool operator==(const ObjectImportance&) const = default;

  double score_of(ObstacleId id) const {
    for (const auto& s : scores)
      if (s.id == id) return s.score;
    throw std::out_of_range("no score for obstacle " + std::to_string(id));
  }
};

template <typename T>
RawAttribution vanilla_gradient(const Policy<T>& policy, const StateVector& s) {
  RawAttribution out;
  out.full_gradient = policy.input_gradient(s, VelocityOutput::kLinear);
  std::copy_n(out.full_gradient.begin(), kNumSectors, out.g.begin());
  return out;
}

/// Absolute value then min-max rescaling to [0, 1]. All-equal magnitudes map
/// to all zeros.
inline ProcessedAttribution postprocess(std::span<const double, kNumSectors> g) {
  ProcessedAttribution out;
  SectorScores mag{};
  for (std::size_t j = 0; j < kNumSectors; ++j) {
    if (!std::isfinite(g[j])) throw std::invalid_argument("attribution scores must be finite");
    mag[j] = std::abs(g[j]);
  }
  const auto [lo, hi] = std::minmax_element(mag.begin(), mag.end());
  const double range = *hi - *lo;
  if (range == 0.0) return out;
  for (std::size_t j = 0; j < kNumSectors; ++j) out.g_star[j] = (mag[j] - *lo) / range;
  return out;
}

inline ProcessedAttribution postprocess(const SectorScores& g) {
  return postprocess(std::span<const double, kNumSectors>(g));
}

inline std::vector<ObstacleId> rank_by_score(const std::vector<ObjectScore>& scores) {
  std::vector<ObjectScore> sorted = scores;
  std::sort(sorted.begin(), sorted.end(), [](const ObjectScore& a, const ObjectScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  std::vector<ObstacleId> out;
  for (const auto& s : sorted) out.push_back(s.id);
  return out;
}

/// Object importance from pooled sector scores. Obstacles no contributing ray
/// reaches score exactly 0.
inline ObjectImportance map_to_objects(const ProcessedAttribution& processed, const PooledScan& pooled,
                                       const LidarScan& scan, const Scene& scene) {
  std::map<ObstacleId, double> best;
  for (const auto& o : scene.obstacles) best[o.id] = 0.0;
  for (std::size_t j = 0; j < kNumSectors; ++j) {
    const auto& hit = scan.hit_object[pooled.contributing_ray[j]];
    if (!hit) continue;
    auto it = best.find(*hit);
    if (it == best.end()) throw std::invalid_argument("scan hit an obstacle the scene does not contain");
    it->second = std::max(it->second, processed.g_star[j]);
  }
  ObjectImportance out;
  for (const auto& o : scene.obstacles) out.scores.push_back({o.id, best[o.id]});
  out.ranking = rank_by_score(out.scores);
  return out;
}

struct OutlineStyle {
  double min_width = 0.5;
  double max_width = 6.0;

  double width(double score) const { return min_width + score * (max_width - min_width); }
};

struct AttributionFrame {
  Observation observation;
  RawAttribution raw;
  ProcessedAttribution processed;
  ObjectImportance importance;
  std::vector<double> outline_widths;          // parallel to importance.scores
  std::array<double, kNumRays> ray_scores{};   // g* of each ray's sector
};

inline std::array<double, kNumRays> ray_display_scores(const ProcessedAttribution& p) {
  std::array<double, kNumRays> out{};
  for (std::size_t k = 0; k < kNumRays; ++k) out[k] = p.g_star[k / kRaysPerSector];
  return out;
}

template <typename T>
AttributionFrame attribution_frame(const Policy<T>& policy, const Scene& scene, const Pose& pose,
                                   const OutlineStyle& style = {}) {
  AttributionFrame f;
  f.observation = build_state(scene, pose);
  f.raw = vanilla_gradient(policy, f.observation.state);
  f.processed = postprocess(f.raw.g);
  f.importance = map_to_objects(f.processed, f.observation.pooled, f.observation.raw, scene);
  for (const auto& s : f.importance.scores) f.outline_widths.push_back(style.width(s.score));
  f.ray_scores = ray_display_scores(f.processed);
  return f;
}

}  // namespace xainav
