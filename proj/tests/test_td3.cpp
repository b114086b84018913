#include <gtest/gtest.h>

#include "support.hpp"

using namespace xainav;
using namespace xainav::testing;

namespace {

TrainConfig small_config(long steps) {
  TrainConfig cfg;
  cfg.total_steps = steps;
  cfg.actor_warmup_steps = 500;
  cfg.batch_size = 32;
  cfg.replay_capacity = 10000;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST(Td3, ZeroStepsReturnsInitialPolicy) {
  const auto cfg = small_config(0);
  const auto result = train(cfg, random_scene_factory());
  std::mt19937_64 rng(cfg.seed);
  const auto init = Policy<float>::random(rng).cast<double>();
  EXPECT_EQ(result.log.episodes.size(), 0u);
  for (std::size_t l = 0; l < init.net().num_layers(); ++l)
    EXPECT_EQ(result.policy.net().layers()[l].weights, init.net().layers()[l].weights);
}

TEST(Td3, SameSeedSameLogAndPolicy) {
  const auto cfg = small_config(1500);
  const auto a = train(cfg, random_scene_factory());
  const auto b = train(cfg, random_scene_factory());
  EXPECT_FALSE(a.log.episodes.empty());
  EXPECT_EQ(a.log, b.log);
  EXPECT_EQ(a.log.to_csv(), b.log.to_csv());
  EXPECT_EQ(a.updates, b.updates);
  for (std::size_t l = 0; l < a.policy.net().num_layers(); ++l)
    EXPECT_EQ(a.policy.net().layers()[l].weights, b.policy.net().layers()[l].weights);
  auto other = cfg;
  other.seed = 4;
  EXPECT_NE(train(other, random_scene_factory()).log, a.log);
}

TEST(Td3, LogCountsAddUp) {
  const auto r = train(small_config(1500), random_scene_factory());
  EXPECT_EQ(r.log.goals + r.log.collisions + r.log.timeouts, int(r.log.episodes.size()));
  const auto csv = r.log.to_csv();
  EXPECT_EQ(csv.rfind("step,episode,return,length,outcome\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), long(r.log.episodes.size()) + 1);
}

TEST(Td3, ConfigJsonRoundTripAndOverrides) {
  TrainConfig c;
  c.total_steps = 1234;
  c.actor_lr = 3e-4;
  c.reward.goal_reward = 10;
  c.episode.max_steps = 50;
  const nlohmann::json j = c;
  const auto back = j.get<TrainConfig>();
  EXPECT_EQ(nlohmann::json(back), j);
  const auto partial = nlohmann::json{{"total_steps", 5}}.get<TrainConfig>();
  EXPECT_EQ(partial.total_steps, 5);
  EXPECT_EQ(partial.discount, 0.99);
  EXPECT_EQ(partial.policy_delay, 2);
  EXPECT_THROW((nlohmann::json{{"discount", 1.5}}.get<TrainConfig>()), std::invalid_argument);
  EXPECT_THROW((nlohmann::json{{"format", "nope"}}.get<TrainConfig>()), std::invalid_argument);
}

TEST(Td3, PinnedDefaults) {
  const TrainConfig c;
  EXPECT_EQ(c.discount, 0.99);
  EXPECT_EQ(c.tau, 5e-3);
  EXPECT_EQ(c.policy_delay, 2);
  EXPECT_EQ(c.smoothing_noise, 0.2);
  EXPECT_EQ(c.smoothing_clip, 0.5);
  EXPECT_EQ(c.exploration_noise, 0.1);
  EXPECT_EQ(c.total_steps, 100000);
}

// Goal 1 m dead ahead in an empty arena.
TEST(Td3, LearnsTrivialEnvironment) {
  auto cfg = small_config(6000);
  cfg.batch_size = 100;
  cfg.actor_warmup_steps = 1000;
  cfg.start_steps = 1000;  // the replay data would otherwise hold only near-straight actions
  const SceneFactory trivial = [](std::mt19937_64&) { return empty_scene({1.0, 0.0}); };
  const auto r = train(cfg, trivial);
  const auto rep = evaluate_policy(controller_for(r.policy), {empty_scene({1.0, 0.0})}, 100);
  EXPECT_GE(rep.success_rate, 0.9);
}
