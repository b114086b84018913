#pragma once
/**
 * @file study.hpp
 * @brief The object-ranking study: scenarios, the 2x2 condition design with
 * counterbalanced block orders, trial simulation with frozen ground truth,
 * baseline rankers and per-condition aggregation.
 *
 * Conditions only gate what a participant is shown. Trials compute the full
 * attribution trace regardless of condition, so ground truth never depends
 * on it.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "xainav/attribution.hpp"
#include "xainav/env.hpp"
#include "xainav/kendall.hpp"
#include "xainav/scene_sampler.hpp"

namespace xainav {

struct Condition {
  bool xai_visible = false;
  bool lidar_visible = false;
  bool operator==(const Condition&) const = default;
  auto operator<=>(const Condition&) const = default;
};

inline std::string to_string(const Condition& c) {
  if (c.xai_visible && c.lidar_visible) return "xai+lidar";
  if (c.xai_visible) return "xai";
  if (c.lidar_visible) return "lidar";
  return "none";
}

inline Condition condition_from_string(std::string_view s) {
  if (s == "none") return {false, false};
  if (s == "lidar") return {false, true};
  if (s == "xai") return {true, false};
  if (s == "xai+lidar") return {true, true};
  throw std::invalid_argument("unknown condition '" + std::string(s) + "'");
}

/// The four cells of the design in a fixed canonical order.
inline constexpr std::array<Condition, 4> kConditions = {
    Condition{false, false}, Condition{false, true}, Condition{true, false}, Condition{true, true}};

inline constexpr int kStudyScenarios = 48;
inline constexpr int kBlocks = 4;
inline constexpr int kTrialsPerBlock = 12;
inline constexpr int kRunTicks = 30;     // 3 s at 10 Hz
inline constexpr int kLingerTicks = 10;  // 1 s

struct Scenario {
  int id = 0;
  Scene scene;
  bool operator==(const Scenario&) const = default;
};

/// Seeded study scenarios: five obstacles, robot facing the goal, start-goal
/// distance at least `min_goal_distance` of the sampler config.
inline std::vector<Scenario> generate_scenarios(std::uint64_t seed, int count = kStudyScenarios,
                                                const SceneSamplerConfig& cfg = study_sampler_config()) {
  if (count <= 0) throw std::invalid_argument("scenario count must be positive");
  std::mt19937_64 rng(seed);
  std::vector<Scenario> out;
  for (int i = 0; i < count; ++i) {
    Scenario s{i, sample_scene(rng, cfg)};
    s.scene.seed = seed;
    validate_scene(s.scene, true);
    out.push_back(std::move(s));
  }
  return out;
}

struct TrialFrame {
  int tick = 0;
  Pose pose;
  Action action;
  AttributionFrame attribution;
};

struct TrialRecord {
  int scenario_id = 0;
  Condition condition;
  std::vector<TrialFrame> frames;
  Outcome outcome = Outcome::kRunning;  // goal/collision if the run ended early
  ObjectImportance ground_truth;        // frozen at the last control tick

  const TrialFrame& frozen_frame() const { return frames.back(); }
};

/// Rolls the policy for up to `ticks` control ticks. Each tick explains the
/// current state, then applies the policy's action.
template <typename T>
TrialRecord run_trial(const Policy<T>& policy, const Scenario& scenario, Condition condition,
                      int ticks = kRunTicks, const OutlineStyle& style = {}) {
  if (ticks <= 0) throw std::invalid_argument("a trial needs at least one tick");
  TrialRecord rec;
  rec.scenario_id = scenario.id;
  rec.condition = condition;
  EpisodeConfig episode;
  episode.max_steps = ticks;
  NavEnv env(scenario.scene, episode);
  for (int t = 0; t < ticks && !env.done(); ++t) {
    TrialFrame f;
    f.tick = t;
    f.pose = env.pose();
    f.attribution = attribution_frame(policy, scenario.scene, f.pose, style);
    f.action = policy.act(f.attribution.observation.state);
    const auto out = env.step(f.action);
    rec.outcome = out.outcome == Outcome::kTimeout ? Outcome::kRunning : out.outcome;
    rec.frames.push_back(std::move(f));
  }
  rec.ground_truth = rec.frozen_frame().attribution.importance;
  return rec;
}

// ---------------------------------------------------------------------------
// Plans

struct StudyPlan {
  int participant = 0;
  std::array<Condition, kBlocks> block_order{};
  std::vector<std::vector<int>> blocks;  // scenario ids per block

  bool operator==(const StudyPlan&) const = default;
  int total_trials() const {
    int n = 0;
    for (const auto& b : blocks) n += int(b.size());
    return n;
  }
};

/// The k-th (mod 24) lexicographic permutation of the four conditions.
inline std::array<Condition, kBlocks> block_order_for(int participant) {
  std::array<int, kBlocks> idx = {0, 1, 2, 3};
  const int k = ((participant % 24) + 24) % 24;
  for (int i = 0; i < k; ++i) std::next_permutation(idx.begin(), idx.end());
  std::array<Condition, kBlocks> out{};
  for (int i = 0; i < kBlocks; ++i) out[std::size_t(i)] = kConditions[std::size_t(idx[std::size_t(i)])];
  return out;
}

/// Counterbalanced block order plus a seeded split of the scenarios into
/// `trials_per_block`-sized blocks.
inline StudyPlan make_plan(int participant, std::uint64_t seed, int scenario_count = kStudyScenarios,
                           int trials_per_block = kTrialsPerBlock) {
  if (trials_per_block <= 0 || scenario_count < kBlocks * trials_per_block)
    throw std::invalid_argument("not enough scenarios for the block layout");
  StudyPlan plan;
  plan.participant = participant;
  plan.block_order = block_order_for(participant);
  std::vector<int> ids(static_cast<std::size_t>(scenario_count));
  std::iota(ids.begin(), ids.end(), 0);
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * std::uint64_t(participant + 1)));
  std::shuffle(ids.begin(), ids.end(), rng);
  for (int b = 0; b < kBlocks; ++b)
    plan.blocks.emplace_back(ids.begin() + b * trials_per_block, ids.begin() + (b + 1) * trials_per_block);
  return plan;
}

// ---------------------------------------------------------------------------
// Baseline rankers

enum class RankStrategy { kOracle, kProximity, kPathProximity, kFrontCone, kRandom };

inline std::string_view to_string(RankStrategy s) {
  switch (s) {
    case RankStrategy::kOracle: return "oracle";
    case RankStrategy::kProximity: return "proximity";
    case RankStrategy::kPathProximity: return "path-proximity";
    case RankStrategy::kFrontCone: return "front-cone";
    case RankStrategy::kRandom: return "random";
  }
  return "?";
}

inline RankStrategy rank_strategy_from_string(std::string_view s) {
  for (auto v : {RankStrategy::kOracle, RankStrategy::kProximity, RankStrategy::kPathProximity,
                 RankStrategy::kFrontCone, RankStrategy::kRandom})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

inline constexpr double kFrontConeHalfAngle = kPi / 3.0;  // +/- 60 degrees

/// Distance between a segment and an obstacle surface (0 when they touch).
inline double segment_distance(const Obstacle& o, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len2 = d.dot(d);
  auto point_to_segment = [&](Vec2 p) {
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + d * t)).norm();
  };
  if (const auto* c = std::get_if<Circle>(&o.shape)) return std::max(0.0, point_to_segment(c->center) - c->radius);
  const auto& r = std::get<Rect>(o.shape);
  // segment crossing the rectangle?
  if (len2 > 0.0) {
    const double len = std::sqrt(len2);
    if (signed_distance(o, a) <= 0.0) return 0.0;
    const auto hit = std::visit([&](const auto& s) { return detail::intersect(s, a, d * (1.0 / len)); }, o.shape);
    if (hit && *hit <= len) return 0.0;
  } else if (signed_distance(o, a) <= 0.0) {
    return 0.0;
  }
  double best = std::min(signed_distance(o, a), signed_distance(o, b));
  const Vec2 h = r.half_extents;
  for (Vec2 corner : {Vec2{-h.x, -h.y}, Vec2{h.x, -h.y}, Vec2{h.x, h.y}, Vec2{-h.x, h.y}})
    best = std::min(best, point_to_segment(r.center + corner));
  return best;
}

namespace detail {

inline std::vector<ObstacleId> sort_ids_by(const Scene& scene, const std::function<double(const Obstacle&)>& key) {
  std::vector<std::pair<double, ObstacleId>> keyed;
  for (const auto& o : scene.obstacles) keyed.emplace_back(key(o), o.id);
  std::sort(keyed.begin(), keyed.end());
  std::vector<ObstacleId> out;
  for (const auto& [k, id] : keyed) out.push_back(id);
  return out;
}

}  // namespace detail

/// A full ranking (most important first) from a heuristic. `pose` is the
/// robot pose at the frozen frame; `truth` is consulted only by the oracle.
inline std::vector<ObstacleId> baseline_rank(RankStrategy strategy, const Scenario& scenario, const Pose& pose,
                                             const ObjectImportance& truth, std::uint64_t seed = 0) {
  const Scene& scene = scenario.scene;
  auto proximity = [&](const Obstacle& o) { return signed_distance(o, pose.position); };
  switch (strategy) {
    case RankStrategy::kOracle:
      return truth.ranking;
    case RankStrategy::kProximity:
      return detail::sort_ids_by(scene, proximity);
    case RankStrategy::kPathProximity:
      return detail::sort_ids_by(scene, [&](const Obstacle& o) {
        return segment_distance(o, scene.robot_start.position, scene.goal);
      });
    case RankStrategy::kFrontCone:
      return detail::sort_ids_by(scene, [&](const Obstacle& o) {
        const Vec2 d = o.center() - pose.position;
        const bool in_cone =
            std::abs(normalize_angle(std::atan2(d.y, d.x) - pose.heading)) <= kFrontConeHalfAngle;
        // cone members first, each group by proximity
        return (in_cone ? 0.0 : 1e6) + proximity(o);
      });
    case RankStrategy::kRandom: {
      std::vector<ObstacleId> ids;
      for (const auto& o : scene.obstacles) ids.push_back(o.id);
      std::mt19937_64 rng(seed);
      std::shuffle(ids.begin(), ids.end(), rng);
      return ids;
    }
  }
  throw std::logic_error("unhandled strategy");
}

// ---------------------------------------------------------------------------
// Aggregation

struct ScoredTrial {
  int participant = 0;
  int block = 0;
  Condition condition;
  int trial = 0;  // index within the block
  int scenario = 0;
  double tau = 0.0;
  bool operator==(const ScoredTrial&) const = default;
};

struct ConditionSummary {
  Condition condition;
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample SD; 0 for a single record
  bool operator==(const ConditionSummary&) const = default;
};

struct StudyAggregate {
  std::vector<ConditionSummary> conditions;  // canonical condition order, present ones only
  std::map<int, std::map<std::string, double>> participant_means;

  const ConditionSummary& of(Condition c) const {
    for (const auto& s : conditions)
      if (s.condition == c) return s;
    throw std::out_of_range("no records for condition " + to_string(c));
  }
};

inline StudyAggregate aggregate(const std::vector<ScoredTrial>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate needs at least one record");
  StudyAggregate out;
  for (const auto& c : kConditions) {
    std::vector<double> taus;
    for (const auto& r : records)
      if (r.condition == c) taus.push_back(r.tau);
    if (taus.empty()) continue;
    ConditionSummary s{c, taus.size(), 0.0, 0.0};
    s.mean = std::accumulate(taus.begin(), taus.end(), 0.0) / double(taus.size());
    if (taus.size() > 1) {
      double ss = 0.0;
      for (double t : taus) ss += (t - s.mean) * (t - s.mean);
      s.sd = std::sqrt(ss / double(taus.size() - 1));
    }
    out.conditions.push_back(s);
  }
  std::map<int, std::map<std::string, std::pair<double, int>>> acc;
  for (const auto& r : records) {
    auto& cell = acc[r.participant][to_string(r.condition)];
    cell.first += r.tau;
    ++cell.second;
  }
  for (const auto& [p, row] : acc)
    for (const auto& [c, cell] : row) out.participant_means[p][c] = cell.first / cell.second;
  return out;
}

/// Long-format CSV: participant,block,condition,trial,scenario,tau
inline std::string records_csv(const std::vector<ScoredTrial>& records) {
  std::ostringstream os;
  os.precision(17);
  os << "participant,block,condition,trial,scenario,tau\n";
  for (const auto& r : records)
    os << r.participant << ',' << r.block << ',' << to_string(r.condition) << ',' << r.trial << ',' << r.scenario
       << ',' << r.tau << '\n';
  return os.str();
}

inline std::string aggregate_csv(const StudyAggregate& agg) {
  std::ostringstream os;
  os.precision(17);
  os << "condition,n,mean,sd\n";
  for (const auto& s : agg.conditions) os << to_string(s.condition) << ',' << s.n << ',' << s.mean << ',' << s.sd << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Headless study with a heuristic ranker standing in for participants

struct HeadlessStudyConfig {
  std::uint64_t seed = 1;
  int participants = 24;
  RankStrategy strategy = RankStrategy::kOracle;
  TieMode tie_mode = TieMode::kTieBroken;
  int trials_per_block = kTrialsPerBlock;
};

/// Simulates every scenario once (conditions do not change dynamics) and
/// scores each participant's plan with the chosen ranker.
template <typename T>
std::vector<ScoredTrial> run_headless_study(const Policy<T>& policy, const std::vector<Scenario>& scenarios,
                                            const HeadlessStudyConfig& cfg) {
  std::vector<TrialRecord> trials;
  for (const auto& s : scenarios) trials.push_back(run_trial(policy, s, Condition{}));
  std::vector<ScoredTrial> out;
  for (int p = 0; p < cfg.participants; ++p) {
    const auto plan = make_plan(p, cfg.seed, int(scenarios.size()), cfg.trials_per_block);
    for (int b = 0; b < kBlocks; ++b)
      for (std::size_t t = 0; t < plan.blocks[std::size_t(b)].size(); ++t) {
        const int sid = plan.blocks[std::size_t(b)][t];
        const auto& rec = trials[std::size_t(sid)];
        const std::uint64_t rank_seed = cfg.seed * 1000003ULL + std::uint64_t(p) * 4096ULL + std::uint64_t(sid);
        const auto ranking =
            baseline_rank(cfg.strategy, scenarios[std::size_t(sid)], rec.frozen_frame().pose, rec.ground_truth, rank_seed);
        out.push_back({p, b, plan.block_order[std::size_t(b)], int(t), sid,
                       ranking_tau(ranking, rec.ground_truth, cfg.tie_mode)});
      }
  }
  return out;
}

}  // namespace xainav
