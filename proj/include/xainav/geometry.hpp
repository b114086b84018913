#pragma once
/**
 * @file geometry.hpp
 * @brief 2D value types for the navigation world: vectors, poses, primitive
 * obstacles and scenes.
 *
 * Obstacles are axis-aligned rectangles or circles. Every distance is in
 * meters, every angle in radians.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace xainav {

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 unit_from_angle(double a) { return {std::cos(a), std::sin(a)}; }

/// Wraps an angle into [-pi, pi). Values already in range pass through
/// unchanged.
inline double normalize_angle(double a) {
  if (a >= -kPi && a < kPi) return a;
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  r -= kPi;
  // fmod rounding can land exactly on +pi
  if (r >= kPi) r -= 2.0 * kPi;
  return r;
}

struct Pose {
  Vec2 position;
  double heading = 0.0;  // [-pi, pi)

  Pose() = default;
  Pose(Vec2 p, double h) : position(p), heading(normalize_angle(h)) {}
  bool operator==(const Pose&) const = default;
};

using ObstacleId = int;

struct Rect {
  Vec2 center;
  Vec2 half_extents;
  bool operator==(const Rect&) const = default;
};

struct Circle {
  Vec2 center;
  double radius = 0.0;
  bool operator==(const Circle&) const = default;
};

struct Obstacle {
  ObstacleId id = 0;
  std::variant<Rect, Circle> shape;

  bool operator==(const Obstacle&) const = default;

  Vec2 center() const {
    return std::visit([](const auto& s) { return s.center; }, shape);
  }
  bool is_circle() const { return std::holds_alternative<Circle>(shape); }
};

/// Signed distance from a point to the obstacle surface (negative inside).
inline double signed_distance(const Obstacle& o, Vec2 p) {
  if (const auto* c = std::get_if<Circle>(&o.shape)) {
    return (p - c->center).norm() - c->radius;
  }
  const auto& r = std::get<Rect>(o.shape);
  const double dx = std::abs(p.x - r.center.x) - r.half_extents.x;
  const double dy = std::abs(p.y - r.center.y) - r.half_extents.y;
  const double ox = std::max(dx, 0.0);
  const double oy = std::max(dy, 0.0);
  return std::hypot(ox, oy) + std::min(std::max(dx, dy), 0.0);
}

/// Axis-aligned world rectangle [min, max].
struct Bounds {
  Vec2 min{-5.0, -5.0};
  Vec2 max{5.0, 5.0};
  bool operator==(const Bounds&) const = default;

  bool contains(Vec2 p, double margin = 0.0) const {
    return p.x >= min.x + margin && p.x <= max.x - margin &&
           p.y >= min.y + margin && p.y <= max.y - margin;
  }
};

struct Scene {
  std::vector<Obstacle> obstacles;
  Vec2 goal;
  Pose robot_start;
  Bounds bounds;
  Vec2 observer_position;
  std::uint64_t seed = 0;

  bool operator==(const Scene&) const = default;

  const Obstacle* find(ObstacleId id) const {
    for (const auto& o : obstacles)
      if (o.id == id) return &o;
    return nullptr;
  }
};

/// Distance from a point to the nearest obstacle surface; +inf for an empty
/// scene.
inline double nearest_obstacle_distance(const Scene& scene, Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : scene.obstacles) best = std::min(best, signed_distance(o, p));
  return best;
}

inline bool inside_any_obstacle(const Scene& scene, Vec2 p) {
  return nearest_obstacle_distance(scene, p) <= 0.0;
}

/// Throws std::invalid_argument when a scene breaks its structural
/// invariants. `study_mode` additionally requires exactly five obstacles.
inline void validate_scene(const Scene& scene, bool study_mode = false) {
  std::set<ObstacleId> ids;
  for (const auto& o : scene.obstacles) {
    if (!ids.insert(o.id).second)
      throw std::invalid_argument("duplicate obstacle id " + std::to_string(o.id));
    if (const auto* c = std::get_if<Circle>(&o.shape)) {
      if (!(c->radius > 0.0) || !c->center.finite())
        throw std::invalid_argument("circle obstacle needs a positive radius");
    } else {
      const auto& r = std::get<Rect>(o.shape);
      if (!(r.half_extents.x > 0.0) || !(r.half_extents.y > 0.0) || !r.center.finite())
        throw std::invalid_argument("rectangle obstacle needs positive half-extents");
    }
  }
  if (!scene.goal.finite() || !scene.robot_start.position.finite())
    throw std::invalid_argument("non-finite goal or start");
  if (!(scene.bounds.max.x > scene.bounds.min.x && scene.bounds.max.y > scene.bounds.min.y))
    throw std::invalid_argument("empty bounds");
  if (inside_any_obstacle(scene, scene.robot_start.position))
    throw std::invalid_argument("robot start lies inside an obstacle");
  if (inside_any_obstacle(scene, scene.goal))
    throw std::invalid_argument("goal lies inside an obstacle");
  if (study_mode && scene.obstacles.size() != 5)
    throw std::invalid_argument("study scenes need exactly 5 obstacles");
}

}  // namespace xainav
