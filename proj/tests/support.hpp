#pragma once
// Shared scene builders for the test suites.

#include <random>

#include "xainav/xainav.hpp"

namespace xainav::testing {

inline Obstacle rect(ObstacleId id, Vec2 c, Vec2 half) { return {id, Rect{c, half}}; }
inline Obstacle circle(ObstacleId id, Vec2 c, double r) { return {id, Circle{c, r}}; }

inline Scene empty_scene(Vec2 goal = {3.0, 0.0}) {
  Scene s;
  s.goal = goal;
  s.robot_start = Pose{{0.0, 0.0}, 0.0};
  return s;
}

inline Scene scene_with(std::vector<Obstacle> obstacles, Vec2 goal = {4.0, 4.0}) {
  Scene s = empty_scene(goal);
  s.obstacles = std::move(obstacles);
  return s;
}

/// Five-obstacle study-style scene from the study sampler.
inline Scene random_study_scene(std::mt19937_64& rng) { return sample_scene(rng, study_sampler_config()); }

inline StateVector random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0), th(-1.0, 1.0);
  StateVector s{};
  for (std::size_t i = 0; i < kNumSectors; ++i) s[i] = u(rng);
  s[kGoalSlice] = u(rng) * 0.6;
  s[kGoalSlice + 1] = th(rng);
  return s;
}

}  // namespace xainav::testing
