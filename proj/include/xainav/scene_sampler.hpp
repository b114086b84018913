#pragma once
/**
 * @file scene_sampler.hpp
 * @brief Seeded rejection sampler for navigation scenes.
 *
 * Obstacles land uniformly in the arena, or, for a configurable fraction,
 * near the start-goal segment. Training scenes use uniform placement; study
 * scenes bias half of their obstacles toward the path so the robot has
 * something to react to within its short run. Start and goal keep a
 * clearance from every obstacle surface.
 */

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "xainav/geometry.hpp"
#include "xainav/world.hpp"

namespace xainav {

struct SceneSamplerConfig {
  int min_obstacles = 3;
  int max_obstacles = 6;
  Bounds bounds{{-5.0, -5.0}, {5.0, 5.0}};
  double spawn_margin = 1.0;        // start/goal stay this far inside bounds
  double min_goal_distance = 2.0;
  double max_goal_distance = 6.0;
  double start_clearance = 0.7;     // obstacle surface to start
  double goal_clearance = 0.6;      // obstacle surface to goal
  double heading_noise = 0.0;       // uniform +/- radians around the goal bearing
  double on_path_fraction = 0.5;
  double path_offset = 1.5;         // max lateral offset of on-path obstacles
  int max_attempts = 1000;
};

inline SceneSamplerConfig training_sampler_config() {
  SceneSamplerConfig c;
  c.heading_noise = kPi / 6.0;
  c.on_path_fraction = 0.0;
  return c;
}

inline SceneSamplerConfig study_sampler_config() {
  SceneSamplerConfig c;
  c.min_obstacles = 5;
  c.max_obstacles = 5;
  c.heading_noise = 0.0;
  return c;
}

namespace detail {

template <typename Rng>
double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <typename Rng>
Obstacle random_obstacle(Rng& rng, ObstacleId id, Vec2 center) {
  if (uniform(rng, 0.0, 1.0) < 0.5) return {id, Circle{center, uniform(rng, 0.2, 0.5)}};
  return {id, Rect{center, {uniform(rng, 0.15, 0.6), uniform(rng, 0.15, 0.6)}}};
}

}  // namespace detail

/// Draws one scene. Throws std::runtime_error when no valid layout turns up
/// within `max_attempts` tries per element.
template <typename Rng>
Scene sample_scene(Rng& rng, const SceneSamplerConfig& cfg) {
  using detail::uniform;
  if (cfg.min_obstacles < 0 || cfg.max_obstacles < cfg.min_obstacles)
    throw std::invalid_argument("bad obstacle count range");
  Scene scene;
  scene.bounds = cfg.bounds;
  const Vec2 lo = cfg.bounds.min + Vec2{cfg.spawn_margin, cfg.spawn_margin};
  const Vec2 hi = cfg.bounds.max - Vec2{cfg.spawn_margin, cfg.spawn_margin};

  bool placed = false;
  Vec2 start, goal;
  for (int attempt = 0; attempt < cfg.max_attempts && !placed; ++attempt) {
    start = {uniform(rng, lo.x, hi.x), uniform(rng, lo.y, hi.y)};
    const double dist = uniform(rng, cfg.min_goal_distance, cfg.max_goal_distance);
    goal = start + unit_from_angle(uniform(rng, -kPi, kPi)) * dist;
    placed = goal.x >= lo.x && goal.x <= hi.x && goal.y >= lo.y && goal.y <= hi.y;
  }
  if (!placed) throw std::runtime_error("scene sampler: no start/goal pair within bounds");
  const Vec2 d = goal - start;
  const double bearing = std::atan2(d.y, d.x);
  scene.robot_start = Pose{start, bearing + uniform(rng, -cfg.heading_noise, cfg.heading_noise)};
  scene.goal = goal;

  const int count = std::uniform_int_distribution<int>(cfg.min_obstacles, cfg.max_obstacles)(rng);
  const Vec2 normal{-d.y / d.norm(), d.x / d.norm()};
  for (int i = 0; i < count; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < cfg.max_attempts && !ok; ++attempt) {
      Vec2 c;
      if (uniform(rng, 0.0, 1.0) < cfg.on_path_fraction)
        c = start + d * uniform(rng, 0.15, 0.9) + normal * uniform(rng, -cfg.path_offset, cfg.path_offset);
      else
        c = {uniform(rng, cfg.bounds.min.x, cfg.bounds.max.x), uniform(rng, cfg.bounds.min.y, cfg.bounds.max.y)};
      Obstacle o = detail::random_obstacle(rng, i, c);
      ok = signed_distance(o, start) >= cfg.start_clearance && signed_distance(o, goal) >= cfg.goal_clearance;
      if (ok) scene.obstacles.push_back(o);
    }
    if (!ok) throw std::runtime_error("scene sampler: could not place obstacle " + std::to_string(i));
  }
  scene.observer_position = {uniform(rng, cfg.bounds.min.x, cfg.bounds.max.x), cfg.bounds.min.y};
  validate_scene(scene);
  return scene;
}

}  // namespace xainav
