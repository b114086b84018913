#pragma once
// Navigation reward: sparse terminal terms plus dense jerk, time and
// obstacle-proximity penalties.

#include <cmath>
#include <stdexcept>
#include <string_view>

#include "xainav/world.hpp"

namespace xainav {

enum class Outcome { kRunning, kGoal, kCollision, kTimeout };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kGoal: return "goal";
    case Outcome::kCollision: return "collision";
    case Outcome::kTimeout: return "timeout";
    case Outcome::kRunning: break;
  }
  return "running";
}

struct RewardConfig {
  double goal_reward = 20.0;
  double collision_penalty = -20.0;
  double timeout_penalty = -1.0;
  double jerk_coeff = 1e-7;
  double time_penalty = -0.001;
  double proximity_penalty = -0.001;
  double proximity_threshold = 0.4;
  double jerk_normalizer = 1.0;  // J_max
  double control_frequency = kControlFrequency;
};

struct RewardTerms {
  double goal = 0.0;
  double collision = 0.0;
  double timeout = 0.0;
  double jerk = 0.0;
  double time = 0.0;
  double proximity = 0.0;

  double total() const { return goal + collision + timeout + jerk + time + proximity; }
};

/// Per-step reward terms. `prev` holds (a_{t-1}, a_{t-2}); `d_min` is the
/// clearance from the robot center to the nearest obstacle surface.
inline RewardTerms reward_terms(const RewardConfig& cfg, const Action& a_t, const Action& a_tm1,
                                const Action& a_tm2, Outcome outcome, double d_min) {
  if (!(d_min >= 0.0)) throw std::invalid_argument("d_min must be non-negative");
  RewardTerms r;
  switch (outcome) {
    case Outcome::kGoal: r.goal = cfg.goal_reward; break;
    case Outcome::kCollision: r.collision = cfg.collision_penalty; break;
    case Outcome::kTimeout: r.timeout = cfg.timeout_penalty; break;
    case Outcome::kRunning: break;
  }
  const double f2 = cfg.control_frequency * cfg.control_frequency;
  const double jv = (a_t.v - 2.0 * a_tm1.v + a_tm2.v) * f2;
  const double jw = (a_t.omega - 2.0 * a_tm1.omega + a_tm2.omega) * f2;
  r.jerk = -cfg.jerk_coeff * (jv * jv + jw * jw) / cfg.jerk_normalizer;
  r.time = cfg.time_penalty;
  if (d_min < cfg.proximity_threshold) r.proximity = cfg.proximity_penalty;
  return r;
}

inline double reward(const RewardConfig& cfg, const Action& a_t, const Action& a_tm1, const Action& a_tm2,
                     Outcome outcome, double d_min) {
  return reward_terms(cfg, a_t, a_tm1, a_tm2, outcome, d_min).total();
}

}  // namespace xainav
