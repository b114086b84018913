#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "support.hpp"

using namespace xainav;
using namespace xainav::testing;

namespace {

std::vector<double> as_double(const std::vector<int>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(Kendall, Examples) {
  const std::vector<double> id = {0, 1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(kendall_tau_b(id, id), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau_b(id, std::vector<double>{4, 3, 2, 1, 0}), -1.0);
  EXPECT_DOUBLE_EQ(kendall_tau_b(id, std::vector<double>{0, 2, 1, 3, 4}), 0.8);
}

TEST(Kendall, Errors) {
  EXPECT_THROW(kendall_tau_b(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
  EXPECT_THROW(kendall_tau_b(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), std::invalid_argument);
  EXPECT_EQ(kendall_tau_b(std::vector<double>{1, 2, 3}, std::vector<double>{5, 5, 5}), 0.0);
}

TEST(Kendall, ExhaustivePermutationPairs) {
  for (int n = 2; n <= 6; ++n) {
    std::vector<int> a(static_cast<std::size_t>(n)), b;
    std::iota(a.begin(), a.end(), 0);
    do {
      b = std::vector<int>(std::size_t(n));
      std::iota(b.begin(), b.end(), 0);
      do {
        const auto x = as_double(a), y = as_double(b);
        ASSERT_EQ(kendall_tau_b(x, y), tau_b_oracle(x, y));
      } while (std::next_permutation(b.begin(), b.end()));
    } while (std::next_permutation(a.begin(), a.end()));
  }
}

TEST(Kendall, SampledTiedGroundTruths) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const int n = std::uniform_int_distribution<int>(2, 6)(rng);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> truth(static_cast<std::size_t>(n));
    std::uniform_int_distribution<int> level(0, 2);  // few levels: many ties
    for (auto& t : truth) t = level(rng);
    const auto x = as_double(perm);
    const double tau = kendall_tau_b(x, truth);
    ASSERT_NEAR(tau, tau_b_oracle(x, truth), 1e-15);
    ASSERT_GE(tau, -1.0);
    ASSERT_LE(tau, 1.0);
  }
}

TEST(RankingTau, ValidatesPermutation) {
  ObjectImportance truth{{{0, 0.9}, {1, 0.5}, {2, 0.0}, {3, 0.0}, {4, 0.2}}, {0, 1, 4, 2, 3}};
  EXPECT_THROW(ranking_tau(std::vector<ObstacleId>{0, 1, 4, 2}, truth), std::invalid_argument);
  EXPECT_THROW(ranking_tau(std::vector<ObstacleId>{0, 1, 4, 2, 2}, truth), std::invalid_argument);
  EXPECT_THROW(ranking_tau(std::vector<ObstacleId>{0, 1, 4, 2, 7}, truth), std::invalid_argument);
}

TEST(RankingTau, TieModes) {
  ObjectImportance truth{{{0, 0.9}, {1, 0.5}, {2, 0.0}, {3, 0.0}, {4, 0.2}}, {0, 1, 4, 2, 3}};
  EXPECT_DOUBLE_EQ(ranking_tau(truth.ranking, truth, TieMode::kTieBroken), 1.0);
  // against the tied scores the strict order has one pair the truth leaves tied
  const double aware = ranking_tau(truth.ranking, truth, TieMode::kTieAware);
  EXPECT_NEAR(aware, 9.0 / std::sqrt(10.0 * 9.0), 1e-15);
  // swapping the two tied objects does not matter when ties are respected
  EXPECT_DOUBLE_EQ(ranking_tau(std::vector<ObstacleId>{0, 1, 4, 3, 2}, truth, TieMode::kTieAware), aware);
  EXPECT_DOUBLE_EQ(ranking_tau(std::vector<ObstacleId>{0, 1, 4, 3, 2}, truth, TieMode::kTieBroken), 0.8);
  EXPECT_EQ(tie_mode_from_string(to_string(TieMode::kTieAware)), TieMode::kTieAware);
  EXPECT_THROW(tie_mode_from_string("loose"), std::invalid_argument);
}
