#pragma once
/**
 * @file world.hpp
 * @brief Robot kinematics and policy-state construction for the 2D world.
 *
 * The policy input is 17 values: 15 min-pooled lidar readings scaled by the
 * lidar range, then the goal in robot-centric polar form (distance scaled by
 * kGoalDistanceScale, bearing scaled by 1/pi).
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "xainav/geometry.hpp"
#include "xainav/lidar.hpp"

namespace xainav {

inline constexpr std::size_t kStateDim = kNumSectors + 2;
inline constexpr std::size_t kGoalSlice = kNumSectors;  // first goal index
inline constexpr std::size_t kActionDim = 2;

inline constexpr double kGoalDistanceScale = 12.0;
inline constexpr double kRobotRadius = 0.2;
inline constexpr double kMaxLinearVelocity = 1.0;
inline constexpr double kMaxAngularVelocity = 1.0;
inline constexpr double kControlFrequency = 10.0;
inline constexpr double kControlPeriod = 1.0 / kControlFrequency;

using StateVector = std::array<double, kStateDim>;

struct Action {
  double v = 0.0;
  double omega = 0.0;
  bool operator==(const Action&) const = default;

  Action clamped() const {
    return {std::clamp(v, 0.0, kMaxLinearVelocity),
            std::clamp(omega, -kMaxAngularVelocity, kMaxAngularVelocity)};
  }
};

struct GoalPolar {
  double r = 0.0;
  double theta = 0.0;
};

/// Goal in the robot frame. The bearing of a goal at the robot position is 0.
inline GoalPolar goal_polar(const Pose& pose, Vec2 goal) {
  const Vec2 d = goal - pose.position;
  const double r = d.norm();
  if (r == 0.0) return {0.0, 0.0};
  return {r, normalize_angle(std::atan2(d.y, d.x) - pose.heading)};
}

struct StepResult {
  Pose pose;
  bool collision = false;
};

/// True when the robot disc overlaps an obstacle or leaves the world bounds.
inline bool in_collision(const Scene& scene, Vec2 p) {
  return nearest_obstacle_distance(scene, p) < kRobotRadius ||
         !scene.bounds.contains(p, kRobotRadius);
}

/// Unicycle update: rotate first, then advance along the new heading.
inline StepResult step(const Scene& scene, const Pose& pose, const Action& action, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step needs dt > 0");
  const Action a = action.clamped();
  const double heading = normalize_angle(pose.heading + a.omega * dt);
  const Vec2 pos = pose.position + unit_from_angle(heading) * (a.v * dt);
  return {Pose{pos, heading}, in_collision(scene, pos)};
}

struct Observation {
  StateVector state{};
  PooledScan pooled;
  LidarScan raw;
};

inline StateVector make_state(const PooledScan& pooled, GoalPolar goal) {
  StateVector s{};
  for (std::size_t j = 0; j < kNumSectors; ++j) s[j] = pooled.distances[j] / kLidarRange;
  s[kGoalSlice] = goal.r / kGoalDistanceScale;
  s[kGoalSlice + 1] = goal.theta / kPi;
  return s;
}

inline Observation build_state(const Scene& scene, const Pose& pose) {
  Observation obs;
  obs.raw = scan(scene, pose);
  obs.pooled = pool(obs.raw);
  obs.state = make_state(obs.pooled, goal_polar(pose, scene.goal));
  return obs;
}

inline std::span<const double> lidar_slice(const StateVector& s) {
  return std::span<const double>(s).first(kNumSectors);
}

}  // namespace xainav
