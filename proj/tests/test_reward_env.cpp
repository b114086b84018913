#include <gtest/gtest.h>

#include "support.hpp"

using namespace xainav;
using namespace xainav::testing;

TEST(Reward, GoalWithConstantActions) {
  const Action a{0.5, 0.1};
  EXPECT_NEAR(reward({}, a, a, a, Outcome::kGoal, 1.0), 19.999, 1e-12);
}

TEST(Reward, ProximityPenalty) {
  const Action a{0.5, 0.1};
  EXPECT_NEAR(reward({}, a, a, a, Outcome::kRunning, 0.3), -0.002, 1e-12);
  EXPECT_NEAR(reward({}, a, a, a, Outcome::kRunning, 0.4), -0.001, 1e-12);  // strict threshold
}

TEST(Reward, JerkTerm) {
  // -1e-7 * (1 * 10^2)^2 - 0.001
  EXPECT_NEAR(reward({}, {1, 0}, {0, 0}, {0, 0}, Outcome::kRunning, 1.0), -0.002, 1e-12);
}

TEST(Reward, TerminalTerms) {
  const Action a{};
  EXPECT_NEAR(reward({}, a, a, a, Outcome::kCollision, 0.0), -20.002, 1e-12);
  EXPECT_NEAR(reward({}, a, a, a, Outcome::kTimeout, 2.0), -1.001, 1e-12);
  EXPECT_THROW(reward({}, a, a, a, Outcome::kRunning, -0.1), std::invalid_argument);
}

TEST(Env, StandingStillTimesOut) {
  NavEnv env(empty_scene(), EpisodeConfig{20, 0.3, 0.1});
  EnvStep last;
  int n = 0;
  while (!env.done()) {
    last = env.step({0.0, 0.0});
    ++n;
  }
  EXPECT_EQ(n, 20);
  EXPECT_EQ(last.outcome, Outcome::kTimeout);
  EXPECT_FALSE(last.terminal());  // truncation
  EXPECT_THROW(env.step({}), std::logic_error);
  env.reset();
  EXPECT_FALSE(env.done());
  EXPECT_EQ(env.steps(), 0);
}

TEST(Env, ReachesGoalAhead) {
  NavEnv env(empty_scene({1.05, 0.0}));
  EnvStep out;
  while (!env.done()) out = env.step({1.0, 0.0});
  EXPECT_EQ(out.outcome, Outcome::kGoal);
  EXPECT_EQ(env.steps(), 8);  // within 0.3 m once x >= 0.75
  EXPECT_TRUE(out.terminal());
}

TEST(Env, CollisionTakesPrecedenceOverGoal) {
  // one 1 m step lands on the goal and 0.1 m from the wall face
  Scene s = scene_with({rect(0, {1.4, 0.0}, {0.3, 1.0})}, {1.0, 0.0});
  NavEnv env(s, EpisodeConfig{300, 0.3, 1.0});
  EnvStep out;
  while (!env.done()) out = env.step({1.0, 0.0});
  EXPECT_EQ(out.outcome, Outcome::kCollision);
}

// Independent per-term recomputation of an episode's return.
TEST(Env, ReturnDecomposesIntoTerms) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> v(0.0, 1.0), w(-1.0, 1.0);
  for (int ep = 0; ep < 30; ++ep) {
    const Scene s = sample_scene(rng, training_sampler_config());
    NavEnv env(s);
    std::vector<Action> actions{{0, 0}, {0, 0}};
    double total = 0.0, oracle = 0.0;
    while (!env.done()) {
      const auto out = env.step({v(rng), w(rng)});
      total += out.reward;
      actions.push_back(out.action);
      const Action& a0 = actions[actions.size() - 1];
      const Action& a1 = actions[actions.size() - 2];
      const Action& a2 = actions[actions.size() - 3];
      const double jv = (a0.v - 2 * a1.v + a2.v) * 100.0, jw = (a0.omega - 2 * a1.omega + a2.omega) * 100.0;
      double r = -1e-7 * (jv * jv + jw * jw) - 0.001;
      const double clearance = std::max(0.0, nearest_obstacle_distance(s, env.pose().position));
      if (clearance < 0.4) r -= 0.001;
      if (out.outcome == Outcome::kGoal) r += 20.0;
      if (out.outcome == Outcome::kCollision) r -= 20.0;
      if (out.outcome == Outcome::kTimeout) r -= 1.0;
      oracle += r;
      EXPECT_NEAR(out.terms.total(), out.reward, 1e-15);
    }
    EXPECT_NEAR(total, oracle, 1e-9);
  }
}

TEST(Eval, AlwaysStopPolicyTimesOut) {
  std::mt19937_64 rng(2);
  std::vector<Scene> scenes;
  for (int i = 0; i < 10; ++i) scenes.push_back(sample_scene(rng, training_sampler_config()));
  const auto rep = evaluate_policy([](const StateVector&) { return Action{0.0, 0.0}; }, scenes, 20);
  EXPECT_DOUBLE_EQ(rep.timeout_rate, 1.0);
  EXPECT_DOUBLE_EQ(rep.success_rate + rep.collision_rate + rep.timeout_rate, 1.0);
  EXPECT_EQ(rep.episodes.size(), 20u);
}
