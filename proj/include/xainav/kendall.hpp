#pragma once
/**
 * @file kendall.hpp
 * @brief Kendall rank correlation (tau-b) between a submitted ranking and a
 * ground-truth order that may contain ties.
 *
 * tau-b is computed as the cosine between the pairwise sign vectors
 *   a_ij = sgn(x_i - x_j),  b_ij = sgn(y_i - y_j)
 * which equals (C - D) / sqrt((n0 - n1)(n0 - n2)) and reduces to tau-a when
 * neither side has ties.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "xainav/attribution.hpp"

namespace xainav {

namespace detail {
inline int sgn(double v) { return (v > 0.0) - (v < 0.0); }
}  // namespace detail

/// tau-b of two paired samples. Throws for fewer than two elements; returns 0
/// when either side is entirely tied (the coefficient is undefined there).
inline double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("kendall_tau_b: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("kendall_tau_b: needs at least two elements");
  long dot = 0, ax = 0, by = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const int a = detail::sgn(x[i] - x[j]);
      const int b = detail::sgn(y[i] - y[j]);
      dot += a * b;
      ax += a * a;
      by += b * b;
    }
  if (ax == 0 || by == 0) return 0.0;
  return double(dot) / std::sqrt(double(ax) * double(by));
}

/// How the ground-truth order enters tau.
enum class TieMode {
  kTieBroken,  // strict order (ties broken by ascending obstacle id)
  kTieAware,   // raw scores, equal scores stay tied
};

inline std::string_view to_string(TieMode m) { return m == TieMode::kTieAware ? "tie-aware" : "tie-broken"; }

inline TieMode tie_mode_from_string(std::string_view s) {
  if (s == "tie-aware") return TieMode::kTieAware;
  if (s == "tie-broken") return TieMode::kTieBroken;
  throw std::invalid_argument("unknown tie mode '" + std::string(s) + "'");
}

/// Throws std::invalid_argument unless `ranking` is a permutation of `ids`.
inline void check_permutation(std::span<const ObstacleId> ranking, std::span<const ObstacleId> ids) {
  if (ranking.size() != ids.size())
    throw std::invalid_argument("ranking has " + std::to_string(ranking.size()) + " entries, expected " +
                                std::to_string(ids.size()));
  std::set<ObstacleId> want(ids.begin(), ids.end());
  std::set<ObstacleId> got;
  for (ObstacleId id : ranking) {
    if (!want.count(id)) throw std::invalid_argument("ranking names unknown object " + std::to_string(id));
    if (!got.insert(id).second) throw std::invalid_argument("ranking repeats object " + std::to_string(id));
  }
}

/// tau between a submitted ranking (most important first) and the
/// attribution ground truth.
inline double ranking_tau(std::span<const ObstacleId> submitted, const ObjectImportance& truth,
                          TieMode mode = TieMode::kTieBroken) {
  check_permutation(submitted, truth.ranking);
  const std::size_t n = truth.scores.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ObstacleId id = truth.scores[i].id;
    x[i] = double(std::find(submitted.begin(), submitted.end(), id) - submitted.begin());
    if (mode == TieMode::kTieAware)
      y[i] = -truth.scores[i].score;
    else
      y[i] = double(std::find(truth.ranking.begin(), truth.ranking.end(), id) - truth.ranking.begin());
  }
  return kendall_tau_b(x, y);
}

}  // namespace xainav
