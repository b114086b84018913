#pragma once
/**
 * @file lidar.hpp
 * @brief Analytic 2D lidar: exact ray/primitive intersection, full 360-ray
 * scans and sector min-pooling down to the policy's 15 readings.
 *
 * Rays are ordered counterclockwise starting at the robot heading. A ray
 * that hits nothing reports exactly the maximum range and no obstacle.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>

#include "xainav/geometry.hpp"

namespace xainav {

inline constexpr double kLidarRange = 6.0;
inline constexpr std::size_t kNumRays = 360;
inline constexpr std::size_t kNumSectors = 15;
inline constexpr std::size_t kRaysPerSector = kNumRays / kNumSectors;

struct RayHit {
  double distance = kLidarRange;
  std::optional<ObstacleId> obstacle;
  bool operator==(const RayHit&) const = default;
};

struct LidarScan {
  std::array<double, kNumRays> distances{};
  std::array<std::optional<ObstacleId>, kNumRays> hit_object{};
};

struct PooledScan {
  std::array<double, kNumSectors> distances{};
  std::array<std::size_t, kNumSectors> contributing_ray{};
};

namespace detail {

// Entry parameter of a ray into a primitive, or nullopt. An origin inside the
// primitive yields 0.
inline std::optional<double> intersect(const Rect& r, Vec2 o, Vec2 d) {
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  const double lo[2] = {r.center.x - r.half_extents.x, r.center.y - r.half_extents.y};
  const double hi[2] = {r.center.x + r.half_extents.x, r.center.y + r.half_extents.y};
  const double orig[2] = {o.x, o.y};
  const double dir[2] = {d.x, d.y};
  for (int axis = 0; axis < 2; ++axis) {
    if (dir[axis] == 0.0) {
      if (orig[axis] < lo[axis] || orig[axis] > hi[axis]) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / dir[axis];
    double t0 = (lo[axis] - orig[axis]) * inv;
    double t1 = (hi[axis] - orig[axis]) * inv;
    if (t0 > t1) std::swap(t0, t1);
    tmin = std::max(tmin, t0);
    tmax = std::min(tmax, t1);
  }
  if (tmax < tmin || tmax < 0.0) return std::nullopt;
  return std::max(tmin, 0.0);
}

inline std::optional<double> intersect(const Circle& c, Vec2 o, Vec2 d) {
  const Vec2 m = o - c.center;
  const double b = m.dot(d);
  const double cc = m.dot(m) - c.radius * c.radius;
  if (cc <= 0.0) return 0.0;
  if (b > 0.0) return std::nullopt;
  const double disc = b * b - cc;
  if (disc < 0.0) return std::nullopt;
  return -b - std::sqrt(disc);
}

}  // namespace detail

/// Nearest hit along a unit-length direction, capped at the lidar range.
inline RayHit raycast(const Scene& scene, Vec2 origin, Vec2 direction) {
  if (std::abs(direction.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("raycast direction must be unit length");
  RayHit best;
  for (const auto& o : scene.obstacles) {
    const auto t = std::visit([&](const auto& s) { return detail::intersect(s, origin, direction); },
                              o.shape);
    if (t && *t < best.distance) {
      best.distance = *t;
      best.obstacle = o.id;
    }
  }
  // grazing hits exactly at max range count as misses so distance == range
  // stays equivalent to "no hit"
  if (best.distance >= kLidarRange) best = RayHit{};
  return best;
}

inline double ray_angle(const Pose& pose, std::size_t k) {
  return pose.heading + static_cast<double>(k) * (2.0 * kPi / static_cast<double>(kNumRays));
}

inline LidarScan scan(const Scene& scene, const Pose& pose) {
  LidarScan out;
  for (std::size_t k = 0; k < kNumRays; ++k) {
    const auto hit = raycast(scene, pose.position, unit_from_angle(ray_angle(pose, k)));
    out.distances[k] = hit.distance;
    out.hit_object[k] = hit.obstacle;
  }
  return out;
}

/// Sector j covers rays [24j, 24j+23]; ties go to the lowest ray index.
inline PooledScan pool(const LidarScan& s) {
  PooledScan out;
  for (std::size_t j = 0; j < kNumSectors; ++j) {
    std::size_t best = j * kRaysPerSector;
    for (std::size_t k = best + 1; k < (j + 1) * kRaysPerSector; ++k)
      if (s.distances[k] < s.distances[best]) best = k;
    out.distances[j] = s.distances[best];
    out.contributing_ray[j] = best;
  }
  return out;
}

}  // namespace xainav
