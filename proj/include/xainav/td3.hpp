#pragma once
/**
 * @file td3.hpp
 * @brief Twin Delayed DDPG over the navigation environment, plus
 * deterministic policy evaluation.
 *
 * Actions live in tanh space [-1, 1]^2 inside the learner (critic inputs,
 * exploration and smoothing noise) and are mapped to velocity commands only
 * when handed to the environment. Timeouts are treated as truncations, so
 * only goal and collision transitions stop bootstrapping.
 *
 * Everything is driven by a single seeded generator: the same config and
 * scene factory always produce the same log and the same actor.
 */

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xainav/env.hpp"
#include "xainav/policy.hpp"
#include "xainav/replay_buffer.hpp"
#include "xainav/scene_sampler.hpp"

namespace xainav {

inline constexpr long kFullTrainingSteps = 500'000;

struct TrainConfig {
  long total_steps = 100'000;
  long start_steps = 0;           // uniform-random actions before the actor acts
  long actor_warmup_steps = 5'000; // critic-only updates before the actor learns
  std::size_t batch_size = 100;
  std::size_t replay_capacity = 1'000'000;
  double discount = 0.99;
  double tau = 5e-3;
  int policy_delay = 2;
  double exploration_noise = 0.1;
  double smoothing_noise = 0.2;
  double smoothing_clip = 0.5;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  std::uint64_t seed = 7;
  RewardConfig reward;
  EpisodeConfig episode;

  void validate() const {
    if (total_steps < 0 || start_steps < 0 || actor_warmup_steps < 0) throw std::invalid_argument("step counts must be non-negative");
    if (batch_size == 0 || replay_capacity < batch_size) throw std::invalid_argument("bad batch/replay sizes");
    if (!(discount > 0.0 && discount <= 1.0)) throw std::invalid_argument("discount must be in (0, 1]");
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must be in (0, 1]");
    if (policy_delay <= 0) throw std::invalid_argument("policy_delay must be positive");
    if (!(exploration_noise >= 0.0 && smoothing_noise >= 0.0 && smoothing_clip >= 0.0))
      throw std::invalid_argument("noise scales must be non-negative");
    if (!(actor_lr > 0.0 && critic_lr > 0.0)) throw std::invalid_argument("learning rates must be positive");
    if (episode.max_steps <= 0 || !(episode.goal_radius > 0.0)) throw std::invalid_argument("bad episode limits");
  }
};

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"format", "xainav.train_config"},
       {"version", 1},
       {"total_steps", c.total_steps},
       {"start_steps", c.start_steps},
       {"actor_warmup_steps", c.actor_warmup_steps},
       {"batch_size", c.batch_size},
       {"replay_capacity", c.replay_capacity},
       {"discount", c.discount},
       {"tau", c.tau},
       {"policy_delay", c.policy_delay},
       {"exploration_noise", c.exploration_noise},
       {"smoothing_noise", c.smoothing_noise},
       {"smoothing_clip", c.smoothing_clip},
       {"actor_lr", c.actor_lr},
       {"critic_lr", c.critic_lr},
       {"seed", c.seed},
       {"reward",
        {{"goal_reward", c.reward.goal_reward},
         {"collision_penalty", c.reward.collision_penalty},
         {"timeout_penalty", c.reward.timeout_penalty},
         {"jerk_coeff", c.reward.jerk_coeff},
         {"time_penalty", c.reward.time_penalty},
         {"proximity_penalty", c.reward.proximity_penalty},
         {"proximity_threshold", c.reward.proximity_threshold},
         {"jerk_normalizer", c.reward.jerk_normalizer},
         {"control_frequency", c.reward.control_frequency}}},
       {"episode",
        {{"max_steps", c.episode.max_steps},
         {"goal_radius", c.episode.goal_radius},
         {"dt", c.episode.dt}}}};
}

/// Missing keys keep their defaults, so a config file may list overrides only.
inline void from_json(const nlohmann::json& j, TrainConfig& c) {
  if (j.contains("format") && j.at("format") != "xainav.train_config")
    throw std::invalid_argument("not a train config");
  c.total_steps = j.value("total_steps", c.total_steps);
  c.start_steps = j.value("start_steps", c.start_steps);
  c.actor_warmup_steps = j.value("actor_warmup_steps", c.actor_warmup_steps);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.replay_capacity = j.value("replay_capacity", c.replay_capacity);
  c.discount = j.value("discount", c.discount);
  c.tau = j.value("tau", c.tau);
  c.policy_delay = j.value("policy_delay", c.policy_delay);
  c.exploration_noise = j.value("exploration_noise", c.exploration_noise);
  c.smoothing_noise = j.value("smoothing_noise", c.smoothing_noise);
  c.smoothing_clip = j.value("smoothing_clip", c.smoothing_clip);
  c.actor_lr = j.value("actor_lr", c.actor_lr);
  c.critic_lr = j.value("critic_lr", c.critic_lr);
  c.seed = j.value("seed", c.seed);
  if (j.contains("reward")) {
    const auto& r = j.at("reward");
    auto& o = c.reward;
    o.goal_reward = r.value("goal_reward", o.goal_reward);
    o.collision_penalty = r.value("collision_penalty", o.collision_penalty);
    o.timeout_penalty = r.value("timeout_penalty", o.timeout_penalty);
    o.jerk_coeff = r.value("jerk_coeff", o.jerk_coeff);
    o.time_penalty = r.value("time_penalty", o.time_penalty);
    o.proximity_penalty = r.value("proximity_penalty", o.proximity_penalty);
    o.proximity_threshold = r.value("proximity_threshold", o.proximity_threshold);
    o.jerk_normalizer = r.value("jerk_normalizer", o.jerk_normalizer);
    o.control_frequency = r.value("control_frequency", o.control_frequency);
  }
  if (j.contains("episode")) {
    const auto& e = j.at("episode");
    c.episode.max_steps = e.value("max_steps", c.episode.max_steps);
    c.episode.goal_radius = e.value("goal_radius", c.episode.goal_radius);
    c.episode.dt = e.value("dt", c.episode.dt);
  }
  c.validate();
}

struct EpisodeLogEntry {
  long step = 0;  // global step at which the episode ended
  int episode = 0;
  double episode_return = 0.0;
  int length = 0;
  Outcome outcome = Outcome::kRunning;
  bool operator==(const EpisodeLogEntry&) const = default;
};

struct TrainingLog {
  std::vector<EpisodeLogEntry> episodes;
  int goals = 0;
  int collisions = 0;
  int timeouts = 0;

  bool operator==(const TrainingLog&) const = default;

  std::string to_csv() const {
    std::ostringstream os;
    os << "step,episode,return,length,outcome\n";
    os.precision(17);
    for (const auto& e : episodes)
      os << e.step << ',' << e.episode << ',' << e.episode_return << ',' << e.length << ','
         << to_string(e.outcome) << '\n';
    return os.str();
  }
};

struct TrainResult {
  Policy<double> policy;
  TrainingLog log;
  long updates = 0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Produces the scene for each new episode.
using SceneFactory = std::function<Scene(std::mt19937_64&)>;

inline SceneFactory random_scene_factory(SceneSamplerConfig cfg = training_sampler_config()) {
  return [cfg](std::mt19937_64& rng) { return sample_scene(rng, cfg); };
}

namespace detail {

template <typename T>
using Mat = typename Mlp<T>::Matrix;

template <typename T>
class Td3Learner {
 public:
  Td3Learner(const TrainConfig& cfg, std::mt19937_64& rng)
      : cfg_(cfg), rng_(rng), actor_(Policy<T>::random(rng).net()), actor_target_(actor_),
        critic1_(Mlp<T>::random(critic_specs(), rng)), critic2_(Mlp<T>::random(critic_specs(), rng)),
        critic1_target_(critic1_), critic2_target_(critic2_), actor_opt_(actor_, cfg.actor_lr),
        critic1_opt_(critic1_, cfg.critic_lr), critic2_opt_(critic2_, cfg.critic_lr) {}

  const Mlp<T>& actor() const { return actor_; }

  std::array<double, 2> act_unit(const StateVector& s) const {
    const auto z = actor_.forward_one(s);
    return {std::tanh(double(z(0))), std::tanh(double(z(1)))};
  }

  void update(const ReplayBuffer& buffer, long iteration, bool train_actor = true) {
    const std::size_t B = cfg_.batch_size;
    const auto idx = buffer.sample_indices(B, rng_);
    const auto Bi = Eigen::Index(B);
    Mat<T> s(Eigen::Index(kStateDim), Bi), s2(Eigen::Index(kStateDim), Bi), a(Eigen::Index(kActionDim), Bi);
    Eigen::Matrix<T, 1, Eigen::Dynamic> r(Bi), not_done(Bi);
    for (std::size_t b = 0; b < B; ++b) {
      const auto& t = buffer[idx[b]];
      const auto c = Eigen::Index(b);
      for (std::size_t i = 0; i < kStateDim; ++i) {
        s(Eigen::Index(i), c) = T(t.state[i]);
        s2(Eigen::Index(i), c) = T(t.next_state[i]);
      }
      a(0, c) = T(t.action[0]);
      a(1, c) = T(t.action[1]);
      r(c) = T(t.reward);
      not_done(c) = t.terminal ? T(0) : T(1);
    }

    // target actions with clipped smoothing noise
    Mat<T> a2 = actor_target_.forward(s2).array().tanh().matrix();
    std::normal_distribution<double> smooth(0.0, cfg_.smoothing_noise);
    for (Eigen::Index c = 0; c < Bi; ++c)
      for (Eigen::Index i = 0; i < 2; ++i) {
        const double n = std::clamp(smooth(rng_), -cfg_.smoothing_clip, cfg_.smoothing_clip);
        a2(i, c) = T(std::clamp(double(a2(i, c)) + n, -1.0, 1.0));
      }
    Mat<T> sa2(Eigen::Index(kStateDim + kActionDim), Bi);
    sa2 << s2, a2;
    const Mat<T> q1t = critic1_target_.forward(sa2);
    const Mat<T> q2t = critic2_target_.forward(sa2);
    const Eigen::Matrix<T, 1, Eigen::Dynamic> y =
        r.array() + T(cfg_.discount) * not_done.array() * q1t.cwiseMin(q2t).array();

    Mat<T> sa(Eigen::Index(kStateDim + kActionDim), Bi);
    sa << s, a;
    last_critic_loss_ = critic_step(critic1_, critic1_opt_, sa, y) + critic_step(critic2_, critic2_opt_, sa, y);
    if (!std::isfinite(last_critic_loss_))
      throw TrainingDiverged("critic loss became non-finite at update " + std::to_string(iteration));

    if (train_actor && iteration % cfg_.policy_delay == 0) {
      typename Mlp<T>::Cache actor_cache;
      const Mat<T> u = actor_.forward(s, &actor_cache).array().tanh().matrix();
      Mat<T> su(Eigen::Index(kStateDim + kActionDim), Bi);
      su << s, u;
      typename Mlp<T>::Cache critic_cache;
      const Mat<T> q = critic1_.forward(su, &critic_cache);
      last_actor_loss_ = -double(q.mean());
      if (!std::isfinite(last_actor_loss_))
        throw TrainingDiverged("actor loss became non-finite at update " + std::to_string(iteration));
      // d(-mean Q)/dQ = -1/B
      const Mat<T> seed = Mat<T>::Constant(1, Bi, T(-1.0 / double(B)));
      const auto cg = critic1_.backward(critic_cache, seed, false);
      Mat<T> du = cg.input.bottomRows(Eigen::Index(kActionDim));
      du.array() *= (T(1) - u.array().square());
      const auto ag = actor_.backward(actor_cache, du, true);
      actor_opt_.step(actor_, ag);

      actor_target_.soft_update_from(actor_, T(cfg_.tau));
      critic1_target_.soft_update_from(critic1_, T(cfg_.tau));
      critic2_target_.soft_update_from(critic2_, T(cfg_.tau));
    }
  }

  double last_critic_loss() const { return last_critic_loss_; }

 private:
  static double critic_step(Mlp<T>& critic, Adam<T>& opt, const Mat<T>& sa,
                            const Eigen::Matrix<T, 1, Eigen::Dynamic>& y) {
    typename Mlp<T>::Cache cache;
    const Mat<T> q = critic.forward(sa, &cache);
    const Mat<T> diff = q - y;
    const double loss = double(diff.squaredNorm()) / double(diff.cols());
    const Mat<T> seed = diff * T(2.0 / double(diff.cols()));
    opt.step(critic, critic.backward(cache, seed, true));
    return loss;
  }

  const TrainConfig& cfg_;
  std::mt19937_64& rng_;
  Mlp<T> actor_, actor_target_;
  Mlp<T> critic1_, critic2_, critic1_target_, critic2_target_;
  Adam<T> actor_opt_, critic1_opt_, critic2_opt_;
  double last_critic_loss_ = 0.0;
  double last_actor_loss_ = 0.0;
};

}  // namespace detail

/// Progress callback: (global step, finished episode entry).
using TrainProgress = std::function<void(long, const EpisodeLogEntry&)>;

inline TrainResult train(const TrainConfig& cfg, const SceneFactory& scenes,
                         const TrainProgress& progress = {}) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  detail::Td3Learner<float> learner(cfg, rng);
  TrainResult result{Policy<double>(learner.actor().cast<double>()), {}, 0};
  if (cfg.total_steps == 0) return result;

  ReplayBuffer buffer(cfg.replay_capacity);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> explore(0.0, cfg.exploration_noise);

  NavEnv env(scenes(rng), cfg.episode, cfg.reward);
  Action prev1, prev2;
  double ep_return = 0.0;
  int episode = 0;
  long updates = 0;
  for (long t = 0; t < cfg.total_steps; ++t) {
    const StateVector s = env.observation().state;
    std::array<double, 2> u;
    if (t < cfg.start_steps) {
      u = {unit(rng), unit(rng)};
    } else {
      u = learner.act_unit(s);
      for (double& x : u) x = std::clamp(x + explore(rng), -1.0, 1.0);
    }
    const auto out = env.step(denormalize_action(u[0], u[1]));
    buffer.add({s, u, out.reward, out.obs.state, out.terminal(), prev1, prev2});
    prev2 = prev1;
    prev1 = out.action;
    ep_return += out.reward;

    // the critics already fit the warmup data; the actor waits for them
    if (buffer.size() >= cfg.batch_size) learner.update(buffer, ++updates, t >= std::max(cfg.start_steps, cfg.actor_warmup_steps));

    if (out.done()) {
      EpisodeLogEntry e{t + 1, episode++, ep_return, env.steps(), out.outcome};
      result.log.episodes.push_back(e);
      switch (out.outcome) {
        case Outcome::kGoal: ++result.log.goals; break;
        case Outcome::kCollision: ++result.log.collisions; break;
        default: ++result.log.timeouts; break;
      }
      if (progress) progress(t + 1, e);
      env = NavEnv(scenes(rng), cfg.episode, cfg.reward);
      prev1 = prev2 = Action{};
      ep_return = 0.0;
    }
  }
  result.policy = Policy<double>(learner.actor().cast<double>());
  result.updates = updates;
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation

/// Anything that maps a state to a velocity command.
using Controller = std::function<Action(const StateVector&)>;

template <typename T>
Controller controller_for(const Policy<T>& policy) {
  return [&policy](const StateVector& s) { return policy.act(s); };
}

struct EpisodeResult {
  std::size_t scenario = 0;
  Outcome outcome = Outcome::kRunning;
  double episode_return = 0.0;
  int length = 0;
  bool operator==(const EpisodeResult&) const = default;
};

struct EvalReport {
  std::vector<EpisodeResult> episodes;
  double success_rate = 0.0;
  double collision_rate = 0.0;
  double timeout_rate = 0.0;
  double mean_return = 0.0;
  bool operator==(const EvalReport&) const = default;

  std::string to_table() const {
    std::ostringstream os;
    os.precision(6);
    os << "episodes " << episodes.size() << "\nsuccess " << success_rate << "\ncollision " << collision_rate
       << "\ntimeout " << timeout_rate << "\nmean_return " << mean_return << "\n\nscenario,outcome,return,length\n";
    for (const auto& e : episodes)
      os << e.scenario << ',' << to_string(e.outcome) << ',' << e.episode_return << ',' << e.length << '\n';
    return os.str();
  }
};

inline EpisodeResult rollout(const Controller& controller, const Scene& scene, const EpisodeConfig& episode = {},
                             const RewardConfig& reward = {}) {
  NavEnv env(scene, episode, reward);
  EpisodeResult r;
  while (!env.done()) {
    const auto out = env.step(controller(env.observation().state));
    r.episode_return += out.reward;
    r.outcome = out.outcome;
  }
  r.length = env.steps();
  return r;
}

/// Deterministic rollouts (no exploration noise), `episodes` of them cycling
/// through `scenes`.
inline EvalReport evaluate_policy(const Controller& controller, const std::vector<Scene>& scenes,
                                  std::size_t episodes, const EpisodeConfig& episode = {},
                                  const RewardConfig& reward = {}) {
  if (scenes.empty() || episodes == 0) throw std::invalid_argument("evaluation needs scenes and episodes");
  EvalReport rep;
  int goals = 0, collisions = 0, timeouts = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < episodes; ++i) {
    auto r = rollout(controller, scenes[i % scenes.size()], episode, reward);
    r.scenario = i % scenes.size();
    goals += r.outcome == Outcome::kGoal;
    collisions += r.outcome == Outcome::kCollision;
    timeouts += r.outcome == Outcome::kTimeout;
    total += r.episode_return;
    rep.episodes.push_back(r);
  }
  const double n = double(episodes);
  rep.success_rate = goals / n;
  rep.collision_rate = collisions / n;
  rep.timeout_rate = timeouts / n;
  rep.mean_return = total / n;
  return rep;
}

/// Held-out scenes from the training distribution, drawn from their own seed.
inline std::vector<Scene> heldout_scenes(std::uint64_t seed, std::size_t count,
                                         const SceneSamplerConfig& cfg = training_sampler_config()) {
  std::mt19937_64 rng(seed);
  std::vector<Scene> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample_scene(rng, cfg));
  return out;
}

}  // namespace xainav
