// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// REPORT lines are seed-dependent behavioural checks that do not fail the run.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "wire_fuzzer.hpp"
#include "xainav/xainav.hpp"

using namespace xainav;
using namespace xainav::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail, bool hard = true) {
  const char* tag = pass ? "PASS" : (hard ? "FAIL" : "REPORT");
  if (!pass && hard) ++failures;
  std::cout << tag << "  " << name << ": " << detail << std::endl;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// Sign pattern of every ReLU pre-activation; a change between s-h and s+h
// means the central difference straddles a kink.
std::vector<bool> relu_pattern(const Mlp<double>& net, const StateVector& s) {
  std::vector<bool> out;
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(s.data(), Eigen::Index(s.size()));
  for (const auto& l : net.layers()) {
    Eigen::VectorXd z = l.weights * x + l.bias;
    if (l.activation == Activation::kRelu) {
      for (Eigen::Index i = 0; i < z.size(); ++i) out.push_back(z[i] > 0.0);
      z = z.cwiseMax(0.0);
    }
    x = z;
  }
  return out;
}

void check_gradients() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  const double h = 1e-5;
  double worst = 0.0;
  long checked = 0, kinks = 0;
  for (int n = 0; n < 100; ++n) {
    const auto p = Policy<double>::random(rng);
    const auto s = random_state(rng);
    for (auto which : {VelocityOutput::kLinear, VelocityOutput::kAngular}) {
      const auto g = p.input_gradient(s, which);
      for (std::size_t i = 0; i < kStateDim; ++i) {
        auto sp = s, sm = s;
        sp[i] += h;
        sm[i] -= h;
        if (relu_pattern(p.net(), sp) != relu_pattern(p.net(), sm)) {
          ++kinks;
          continue;
        }
        const auto ap = p.act(sp), am = p.act(sm);
        const double fd =
            which == VelocityOutput::kLinear ? (ap.v - am.v) / (2 * h) : (ap.omega - am.omega) / (2 * h);
        const double rel = std::abs(g[i] - fd) / std::max({std::abs(fd), std::abs(g[i]), 1e-6});
        worst = std::max(worst, rel);
        ++checked;
      }
    }
  }
  const double secs = seconds_since(t0);
  report("gradient-finite-difference", worst < 1e-4 && secs < 10.0 && checked > 0,
         "100 nets, " + std::to_string(checked) + " coords, max rel err " + fmt(worst) + " (< 1e-4), " +
             std::to_string(kinks) + " kink-straddling coords skipped, " + fmt(secs, 3) + " s (< 10 s)");
}

void check_normalization() {
  std::mt19937_64 rng(202);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> log_c(-3.0, 3.0);
  double worst = 0.0;
  bool ok = true;
  for (int i = 0; i < 10000; ++i) {
    SectorScores g{};
    for (auto& v : g) v = normal(rng) * std::pow(10.0, log_c(rng));
    const auto gs = postprocess(g).g_star;
    const auto [lo, hi] = std::minmax_element(gs.begin(), gs.end());
    ok = ok && *lo == 0.0 && *hi == 1.0;
    const double c = std::pow(10.0, log_c(rng));
    SectorScores scaled{}, flipped{};
    for (std::size_t j = 0; j < g.size(); ++j) scaled[j] = c * g[j], flipped[j] = -g[j];
    const auto gc = postprocess(scaled).g_star, gf = postprocess(flipped).g_star, go = normalize_oracle(g);
    for (std::size_t j = 0; j < g.size(); ++j) {
      ok = ok && gs[j] >= 0.0 && gs[j] <= 1.0;
      worst = std::max({worst, std::abs(gc[j] - gs[j]), std::abs(gf[j] - gs[j]), std::abs(go[j] - gs[j])});
    }
  }
  SectorScores flat{};
  flat.fill(0.3);
  const auto deg = postprocess(flat).g_star;
  ok = ok && std::all_of(deg.begin(), deg.end(), [](double v) { return v == 0.0; });
  report("normalization-properties", ok && worst <= 1e-12,
         "10k vectors, range [0,1] with min 0 and max 1, max deviation under scale/sign/oracle " + fmt(worst) +
             " (<= 1e-12)");
}

void check_kendall() {
  long pairs = 0, mismatches = 0;
  for (int n = 2; n <= 6; ++n) {
    std::vector<int> a(std::size_t(n), 0);
    std::iota(a.begin(), a.end(), 0);
    std::vector<std::vector<double>> perms;
    do perms.emplace_back(a.begin(), a.end());
    while (std::next_permutation(a.begin(), a.end()));
    for (const auto& x : perms)
      for (const auto& y : perms) {
        ++pairs;
        mismatches += kendall_tau_b(x, y) != tau_b_oracle(x, y);
      }
  }
  std::mt19937_64 rng(303);
  long tied = 0;
  for (int i = 0; i < 10000; ++i) {
    const int n = std::uniform_int_distribution<int>(2, 6)(rng);
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    std::iota(x.begin(), x.end(), 0.0);
    std::shuffle(x.begin(), x.end(), rng);
    std::uniform_int_distribution<int> level(0, 2);
    for (auto& v : y) v = level(rng);
    ++tied;
    mismatches += kendall_tau_b(x, y) != tau_b_oracle(x, y);
  }
  report("kendall-tau", mismatches == 0,
         std::to_string(pairs) + " permutation pairs (n = 2..6) + " + std::to_string(tied) +
             " tied ground truths, " + std::to_string(mismatches) + " mismatches (exact)");
}

void check_mapping() {
  std::mt19937_64 rng(404);
  const auto p = Policy<double>::random(rng);
  long mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const Scene s = i % 2 ? random_study_scene(rng) : sample_scene(rng, training_sampler_config());
    const auto f = attribution_frame(p, s, s.robot_start);
    const auto oracle = mapping_oracle(s, f.observation, f.processed.g_star);
    std::vector<std::pair<ObstacleId, double>> sorted(oracle.begin(), oracle.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<ObstacleId> ranking;
    for (const auto& [id, score] : sorted) ranking.push_back(id);
    for (const auto& sc : f.importance.scores) mismatches += sc.score != oracle.at(sc.id);
    mismatches += ranking != f.importance.ranking;
  }
  report("score-to-object-mapping", mismatches == 0,
         "1000 scenes, " + std::to_string(mismatches) + " mismatches against the exhaustive loop (exact)");
}

Policy<double> check_training(const fs::path& work, const std::string& reuse) {
  const auto t0 = Clock::now();
  TrainConfig cfg = read_json_file(XAINAV_TRAIN_CONFIG).get<TrainConfig>();
  Policy<double> policy;
  std::string how;
  if (!reuse.empty()) {
    policy = load_policy(reuse);
    how = "reused " + reuse;
  } else {
    auto result = train(cfg, random_scene_factory());
    policy = result.policy;
    how = std::to_string(cfg.total_steps) + " steps, seed " + std::to_string(cfg.seed);
  }
  save_policy(policy, work / "checkpoint.json");
  const double train_secs = seconds_since(t0);
  const auto eval = evaluate_policy(controller_for(policy), heldout_scenes(12345, 100), 100);
  report("desk-scale-training", eval.success_rate >= 0.8 && eval.collision_rate <= 0.1,
         how + ": goal " + fmt(eval.success_rate) + " (>= 0.8), collision " + fmt(eval.collision_rate) +
             " (<= 0.1) on 100 held-out scenes, " + fmt(train_secs, 4) + " s");
  return policy;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * double(v.size() - 1);
  const auto i = std::size_t(pos);
  return i + 1 < v.size() ? v[i] + (pos - double(i)) * (v[i + 1] - v[i]) : v[i];
}

void check_distribution(const std::vector<TrialRecord>& trials) {
  std::vector<double> lidar, goal;
  for (const auto& t : trials) {
    const auto& raw = t.frozen_frame().attribution.raw;
    lidar.insert(lidar.end(), raw.g.begin(), raw.g.end());
    const auto gg = raw.goal();
    goal.insert(goal.end(), gg.begin(), gg.end());
  }
  const double frac = double(std::count_if(lidar.begin(), lidar.end(), [](double v) { return v >= -1e-3; })) /
                      double(lidar.size());
  const double iqr_lidar = quantile(lidar, 0.75) - quantile(lidar, 0.25);
  const double iqr_goal = quantile(goal, 0.75) - quantile(goal, 0.25);
  report("attribution-distribution", frac > 0.8 && iqr_goal < iqr_lidar,
         std::to_string(trials.size()) + " frozen frames: fraction of lidar entries >= -1e-3 is " + fmt(frac) +
             " (> 0.8), IQR goal " + fmt(iqr_goal) + " vs lidar " + fmt(iqr_lidar),
         false);
}

void check_baselines(const std::vector<Scenario>& scenarios, const std::vector<TrialRecord>& trials) {
  double oracle = 0, proximity = 0, random = 0;
  long n_random = 0;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& rec = trials[i];
    const Pose& pose = rec.frozen_frame().pose;
    oracle += ranking_tau(baseline_rank(RankStrategy::kOracle, scenarios[i], pose, rec.ground_truth), rec.ground_truth);
    proximity +=
        ranking_tau(baseline_rank(RankStrategy::kProximity, scenarios[i], pose, rec.ground_truth), rec.ground_truth);
    for (std::uint64_t seed = 0; seed < 10000; ++seed, ++n_random)
      random += ranking_tau(baseline_rank(RankStrategy::kRandom, scenarios[i], pose, rec.ground_truth,
                                          seed * 131 + i),
                            rec.ground_truth);
  }
  const double n = double(scenarios.size());
  oracle /= n, proximity /= n, random /= double(n_random);
  const bool ok = oracle == 1.0 && std::abs(random) <= 0.05 && proximity > random && proximity < oracle;
  report("baseline-ordering", ok,
         "48 scenarios: oracle " + fmt(oracle, 6) + " (= 1), random " + fmt(random, 4) + " over 10k seeds (|.| <= 0.05), proximity " +
             fmt(proximity, 4) + " (strictly between)");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void check_cli_determinism(const fs::path& work) {
  std::vector<std::string> outputs;
  bool ran = true;
  for (const char* run : {"study-a", "study-b"}) {
    const auto dir = work / run;
    fs::remove_all(dir);
    const std::string cmd = std::string("\"") + XAINAV_CLI_PATH + "\" study --checkpoint \"" +
                            (work / "checkpoint.json").string() + "\" --strategy random --participants 24 --seed 11 --out \"" +
                            dir.string() + "\" > \"" + (work / run).string() + ".log\" 2>&1";
    ran = ran && std::system(cmd.c_str()) == 0;
    outputs.push_back(slurp(dir / "records.csv") + "\x1e" + slurp(dir / "aggregate.csv"));
  }
  const bool same = ran && outputs[0] == outputs[1] && outputs[0].size() > 100;
  report("cli-study-determinism", same,
         std::string(ran ? "two runs of `xainav study --seed 11`" : "cli run failed") + ", records.csv + aggregate.csv " +
             (same ? "byte-identical" : "differ") + " (" + std::to_string(outputs[0].size()) + " bytes)");
}

template <typename M>
bool round_trips(const M& m) {
  const auto text = wire::encode(m);
  return wire::decode<M>(text) == m && wire::encode(wire::decode<M>(text)) == text;
}

void check_wire() {
  Fuzzer f{std::mt19937_64(505)};
  long bad = 0;
  for (int i = 0; i < 1000; ++i) {
    bad += !round_trips(f.frame());
    bad += !round_trips(f.create());
    bad += !round_trips(f.session());
    bad += !round_trips(f.trial());
    bad += !round_trips(f.ranking());
    bad += !round_trips(f.result());
    bad += !round_trips(f.results());
    bad += !round_trips(f.error());
  }
  report("wire-round-trip", bad == 0, "8 message types x 1000 fuzzed instances, " + std::to_string(bad) + " failures");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("acceptance checks");
  std::string work_dir = "acceptance-work", reuse;
  app.add_option("--work-dir", work_dir, "scratch directory for checkpoints and CLI output");
  app.add_option("--checkpoint", reuse, "evaluate this checkpoint instead of training one");
  CLI11_PARSE(app, argc, argv);
  const fs::path work(work_dir);
  fs::create_directories(work);

  try {
    check_gradients();
    check_normalization();
    check_kendall();
    check_mapping();
    const auto policy = check_training(work, reuse);
    const auto scenarios = generate_scenarios(1);
    std::vector<TrialRecord> trials;
    for (const auto& s : scenarios) trials.push_back(run_trial(policy, s, Condition{}));
    check_distribution(trials);
    check_baselines(scenarios, trials);
    check_cli_determinism(work);
    check_wire();
  } catch (const std::exception& e) {
    report("harness", false, std::string("aborted: ") + e.what());
  }
  std::cout << (failures ? "FAILED" : "ALL PASSED") << " (" << failures << " failing)" << std::endl;
  return failures ? 1 : 0;
}
