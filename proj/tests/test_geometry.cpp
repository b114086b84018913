#include <gtest/gtest.h>

#include "support.hpp"

using namespace xainav;
using namespace xainav::testing;

TEST(Geometry, NormalizeAngleRange) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = u(rng);
    const double n = normalize_angle(a);
    EXPECT_GE(n, -kPi);
    EXPECT_LT(n, kPi);
    EXPECT_NEAR(std::remainder(n - a, 2.0 * kPi), 0.0, 1e-9);
    EXPECT_EQ(normalize_angle(n), n);  // idempotent
  }
  EXPECT_DOUBLE_EQ(normalize_angle(kPi), -kPi);
}

TEST(Geometry, SignedDistanceCircle) {
  const auto c = circle(0, {1.0, 1.0}, 0.5);
  EXPECT_DOUBLE_EQ(signed_distance(c, {3.0, 1.0}), 1.5);
  EXPECT_DOUBLE_EQ(signed_distance(c, {1.0, 1.0}), -0.5);
}

TEST(Geometry, SignedDistanceRectMatchesSampledOracle) {
  // distance to the surface from outside = min over densely sampled boundary points
  const auto r = rect(0, {0.5, -0.2}, {0.4, 0.7});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const Vec2 p{u(rng), u(rng)};
    const Rect& g = std::get<Rect>(r.shape);
    const bool inside = std::abs(p.x - g.center.x) <= g.half_extents.x && std::abs(p.y - g.center.y) <= g.half_extents.y;
    double best = 1e9;
    const int n = 4000;
    for (int k = 0; k <= n; ++k) {
      const double t = double(k) / n;
      const double x0 = g.center.x - g.half_extents.x, x1 = g.center.x + g.half_extents.x;
      const double y0 = g.center.y - g.half_extents.y, y1 = g.center.y + g.half_extents.y;
      for (Vec2 q : {Vec2{x0 + t * (x1 - x0), y0}, Vec2{x0 + t * (x1 - x0), y1}, Vec2{x0, y0 + t * (y1 - y0)},
                     Vec2{x1, y0 + t * (y1 - y0)}})
        best = std::min(best, (p - q).norm());
    }
    EXPECT_NEAR(signed_distance(r, p), inside ? -best : best, 1e-3);
  }
}

TEST(Geometry, ValidateSceneRejectsBadInput) {
  EXPECT_NO_THROW(validate_scene(empty_scene()));
  EXPECT_THROW(validate_scene(scene_with({circle(1, {2, 2}, 0.3), circle(1, {-2, 2}, 0.3)})), std::invalid_argument);
  EXPECT_THROW(validate_scene(scene_with({circle(1, {2, 2}, 0.0)})), std::invalid_argument);
  EXPECT_THROW(validate_scene(scene_with({rect(1, {2, 2}, {0.5, -1.0})})), std::invalid_argument);
  EXPECT_THROW(validate_scene(scene_with({circle(1, {0, 0}, 0.5)})), std::invalid_argument);  // start inside
  EXPECT_THROW(validate_scene(scene_with({circle(1, {4, 4}, 0.5)})), std::invalid_argument);  // goal inside
  Scene bad = empty_scene();
  bad.goal = {std::nan(""), 0.0};
  EXPECT_THROW(validate_scene(bad), std::invalid_argument);
  bad = empty_scene();
  bad.bounds.max = bad.bounds.min;
  EXPECT_THROW(validate_scene(bad), std::invalid_argument);
  EXPECT_THROW(validate_scene(scene_with({circle(1, {2, 2}, 0.3)}), true), std::invalid_argument);
}

TEST(SceneSampler, StudyScenesHaveFiveObstaclesAndFaceGoal) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Scene s = random_study_scene(rng);
    EXPECT_EQ(s.obstacles.size(), 5u);
    EXPECT_NO_THROW(validate_scene(s, true));
    EXPECT_NEAR(goal_polar(s.robot_start, s.goal).theta, 0.0, 1e-9);
    EXPECT_GE((s.goal - s.robot_start.position).norm(), 2.0);
    EXPECT_GE(nearest_obstacle_distance(s, s.robot_start.position), 0.7);
  }
}

TEST(SceneSampler, TrainingScenesWithinDeclaredRanges) {
  std::mt19937_64 rng(12);
  const auto cfg = training_sampler_config();
  for (int i = 0; i < 200; ++i) {
    const Scene s = sample_scene(rng, cfg);
    EXPECT_GE(int(s.obstacles.size()), cfg.min_obstacles);
    EXPECT_LE(int(s.obstacles.size()), cfg.max_obstacles);
    EXPECT_LE(std::abs(goal_polar(s.robot_start, s.goal).theta), cfg.heading_noise + 1e-9);
    const double d = (s.goal - s.robot_start.position).norm();
    EXPECT_GE(d, cfg.min_goal_distance);
    EXPECT_LE(d, cfg.max_goal_distance);
  }
}

TEST(SceneSampler, ImpossibleConfigFails) {
  auto cfg = study_sampler_config();
  cfg.min_goal_distance = cfg.max_goal_distance = 50.0;
  std::mt19937_64 rng(1);
  EXPECT_THROW(sample_scene(rng, cfg), std::runtime_error);
}
