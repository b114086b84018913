#pragma once
/**
 * @file env.hpp
 * @brief Episodic navigation environment over a fixed scene.
 *
 * Each step integrates the unicycle for one control period, classifies the
 * outcome (collision beats goal, goal beats timeout) and scores it with the
 * navigation reward. Exactly one terminal outcome ends an episode.
 */

#include <cmath>
#include <stdexcept>

#include "xainav/geometry.hpp"
#include "xainav/reward.hpp"
#include "xainav/world.hpp"

namespace xainav {

struct EpisodeConfig {
  int max_steps = 300;
  double goal_radius = 0.3;
  double dt = kControlPeriod;
};

struct EnvStep {
  Observation obs;
  Action action;  // clamped command actually applied
  RewardTerms terms;
  double reward = 0.0;
  Outcome outcome = Outcome::kRunning;
  double d_min = 0.0;

  bool done() const { return outcome != Outcome::kRunning; }
  /// Terminal for bootstrapping purposes; timeouts are truncations.
  bool terminal() const { return outcome == Outcome::kGoal || outcome == Outcome::kCollision; }
};

class NavEnv {
 public:
  NavEnv(Scene scene, EpisodeConfig episode = {}, RewardConfig reward = {})
      : scene_(std::move(scene)), episode_(episode), reward_(reward) {
    validate_scene(scene_);
    reset();
  }

  const Observation& reset() {
    pose_ = scene_.robot_start;
    prev1_ = prev2_ = Action{};
    steps_ = 0;
    done_ = false;
    obs_ = build_state(scene_, pose_);
    return obs_;
  }

  EnvStep step(const Action& requested) {
    if (done_) throw std::logic_error("step() on a finished episode; call reset()");
    const Action a = requested.clamped();
    const auto moved = xainav::step(scene_, pose_, a, episode_.dt);
    pose_ = moved.pose;
    ++steps_;

    EnvStep out;
    out.action = a;
    out.d_min = std::max(0.0, nearest_obstacle_distance(scene_, pose_.position));
    if (moved.collision)
      out.outcome = Outcome::kCollision;
    else if ((scene_.goal - pose_.position).norm() <= episode_.goal_radius)
      out.outcome = Outcome::kGoal;
    else if (steps_ >= episode_.max_steps)
      out.outcome = Outcome::kTimeout;
    out.terms = reward_terms(reward_, a, prev1_, prev2_, out.outcome, out.d_min);
    out.reward = out.terms.total();
    prev2_ = prev1_;
    prev1_ = a;
    done_ = out.done();
    obs_ = build_state(scene_, pose_);
    out.obs = obs_;
    return out;
  }

  const Scene& scene() const { return scene_; }
  const Pose& pose() const { return pose_; }
  const Observation& observation() const { return obs_; }
  int steps() const { return steps_; }
  bool done() const { return done_; }
  const RewardConfig& reward_config() const { return reward_; }
  const EpisodeConfig& episode_config() const { return episode_; }

 private:
  Scene scene_;
  EpisodeConfig episode_;
  RewardConfig reward_;
  Pose pose_;
  Action prev1_, prev2_;
  int steps_ = 0;
  bool done_ = false;
  Observation obs_;
};

}  // namespace xainav
