// xainav command line: training, evaluation, scenario generation, headless
// baseline studies, the study server and figure exports.
//
// Paths default to the data directory given by $XAINAV_DATA_DIR (falling
// back to ./xainav-data).

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xainav/server.hpp"
#include "xainav/xainav.hpp"

namespace fs = std::filesystem;
using namespace xainav;

namespace {

fs::path data_dir() {
  const char* env = std::getenv("XAINAV_DATA_DIR");
  return env && *env ? fs::path(env) : fs::path("xainav-data");
}

fs::path or_default(const std::string& given, const char* name) {
  return given.empty() ? data_dir() / name : fs::path(given);
}

std::vector<Scenario> scenarios_or_generate(const std::string& path, std::uint64_t seed) {
  if (!path.empty()) return load_scenarios(path);
  return generate_scenarios(seed);
}

const Scenario& pick(const std::vector<Scenario>& scenarios, int id) {
  for (const auto& s : scenarios)
    if (s.id == id) return s;
  throw std::invalid_argument("no scenario with id " + std::to_string(id));
}

struct Options {
  std::string config, checkpoint, scenarios, out, host = "127.0.0.1", strategy = "oracle", tie_mode = "tie-broken",
                                               log_dir;
  std::optional<long> steps;
  std::optional<std::uint64_t> seed;
  int port = 8080, count = kStudyScenarios, participants = 24, episodes = 100, scenario = 0, timestep = -1,
      bins = 40;
  bool pace = true, full = false;
  std::vector<std::string> traces;
};

int cmd_train(const Options& o) {
  TrainConfig cfg;
  if (!o.config.empty()) cfg = read_json_file(o.config).get<TrainConfig>();
  if (o.steps) cfg.total_steps = *o.steps;
  if (o.full) cfg.total_steps = kFullTrainingSteps;
  if (o.seed) cfg.seed = *o.seed;
  cfg.validate();
  const fs::path out = o.out.empty() ? data_dir() : fs::path(o.out);
  std::cerr << "training " << cfg.total_steps << " steps, seed " << cfg.seed << '\n';
  long next_report = 10'000;
  auto result = train(cfg, random_scene_factory(), [&](long step, const EpisodeLogEntry&) {
    if (step < next_report) return;
    next_report += 10'000;
    std::cerr << "  step " << step << '\n';
  });
  save_policy(result.policy, out / "checkpoint.json");
  write_text_file(out / "train_log.csv", result.log.to_csv());
  write_text_file(out / "train_config.json", nlohmann::json(cfg).dump(2) + "\n");
  std::cout << "episodes " << result.log.episodes.size() << " goals " << result.log.goals << " collisions "
            << result.log.collisions << " timeouts " << result.log.timeouts << '\n'
            << "checkpoint " << (out / "checkpoint.json").string() << '\n';
  return 0;
}

int cmd_eval(const Options& o) {
  const auto policy = load_policy(or_default(o.checkpoint, "checkpoint.json"));
  std::vector<Scene> scenes;
  if (!o.scenarios.empty()) {
    for (auto& s : load_scenarios(o.scenarios)) scenes.push_back(std::move(s.scene));
  } else {
    scenes = heldout_scenes(o.seed.value_or(12345), std::size_t(o.episodes));
  }
  if (o.episodes <= 0) throw std::invalid_argument("--episodes must be positive");
  const auto table = evaluate_policy(controller_for(policy), scenes, std::size_t(o.episodes)).to_table();
  if (o.out.empty())
    std::cout << table;
  else
    write_text_file(o.out, table);
  return 0;
}

int cmd_scenarios(const Options& o) {
  const auto scenarios = generate_scenarios(o.seed.value_or(1), o.count);
  const fs::path out = or_default(o.out, "scenarios.json");
  write_text_file(out, scenarios_json(scenarios).dump(2) + "\n");
  std::cout << scenarios.size() << " scenarios -> " << out.string() << '\n';
  return 0;
}

int cmd_study(const Options& o) {
  const auto policy = load_policy(or_default(o.checkpoint, "checkpoint.json"));
  HeadlessStudyConfig cfg;
  cfg.seed = o.seed.value_or(1);
  cfg.participants = o.participants;
  cfg.strategy = rank_strategy_from_string(o.strategy);
  cfg.tie_mode = tie_mode_from_string(o.tie_mode);
  if (cfg.participants <= 0) throw std::invalid_argument("--participants must be positive");
  const auto scenarios = scenarios_or_generate(o.scenarios, cfg.seed);
  const auto records = run_headless_study(policy, scenarios, cfg);
  const auto summary = aggregate_csv(aggregate(records));
  if (!o.out.empty()) {
    write_text_file(fs::path(o.out) / "records.csv", records_csv(records));
    write_text_file(fs::path(o.out) / "aggregate.csv", summary);
  }
  std::cout << summary;
  return 0;
}

StudyServer* g_server = nullptr;

int cmd_serve(const Options& o) {
  const auto policy = load_policy(or_default(o.checkpoint, "checkpoint.json"));
  ServiceConfig cfg;
  cfg.plan_seed = o.seed.value_or(1);
  cfg.tie_mode = tie_mode_from_string(o.tie_mode);
  if (!o.log_dir.empty()) cfg.log_dir = o.log_dir;
  StudyService service(policy, scenarios_or_generate(o.scenarios, cfg.plan_seed), cfg);
  StudyServer server(service);
  g_server = &server;
  std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
  std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
  std::cerr << "serving on http://" << o.host << ':' << o.port << '\n';
  if (!server.listen(o.host, o.port)) throw std::runtime_error("cannot listen on " + o.host + ":" + std::to_string(o.port));
  return 0;
}

int cmd_trace(const Options& o) {
  const auto policy = load_policy(or_default(o.checkpoint, "checkpoint.json"));
  const auto scenarios = scenarios_or_generate(o.scenarios, o.seed.value_or(1));
  const fs::path out = o.out.empty() ? data_dir() / "traces" : fs::path(o.out);
  int written = 0;
  for (const auto& s : scenarios) {
    if (o.scenario >= 0 && s.id != o.scenario) continue;
    write_text_file(out / ("trace_" + std::to_string(s.id) + ".csv"), trace_csv(run_trial(policy, s, Condition{})));
    ++written;
  }
  if (written == 0) throw std::invalid_argument("no scenario with id " + std::to_string(o.scenario));
  std::cout << written << " trace(s) -> " << out.string() << '\n';
  return 0;
}

int cmd_export_hist(const Options& o) {
  TraceSamples samples;
  for (const auto& path : o.traces) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    try {
      read_trace_csv(in, samples);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ": " + e.what());
    }
  }
  if (samples.lidar.empty()) throw std::invalid_argument("traces contain no frames");
  const auto hs = attribution_histograms(samples, o.bins);
  const fs::path prefix = or_default(o.out, "hist");
  write_text_file(prefix.string() + ".csv", histograms_csv(hs));
  write_text_file(prefix.string() + ".svg", histograms_svg(hs));
  std::cout << "histograms -> " << prefix.string() << ".{csv,svg}\n";
  return 0;
}

int cmd_export_scene(const Options& o) {
  const auto policy = load_policy(or_default(o.checkpoint, "checkpoint.json"));
  const auto scenarios = scenarios_or_generate(o.scenarios, o.seed.value_or(1));
  const auto& scenario = pick(scenarios, o.scenario);
  const auto rec = run_trial(policy, scenario, Condition{});
  if (o.timestep >= int(rec.frames.size()))
    throw std::invalid_argument("timestep " + std::to_string(o.timestep) + " beyond trial of " +
                                std::to_string(rec.frames.size()) + " frames");
  const auto& frame = o.timestep < 0 ? rec.frozen_frame() : rec.frames[std::size_t(o.timestep)];
  const fs::path prefix = or_default(o.out, "scene");
  write_text_file(prefix.string() + ".csv", scene_map_csv(scenario.scene, frame));
  write_text_file(prefix.string() + ".svg", scene_map_svg(scenario.scene, frame));
  std::cout << "scene map -> " << prefix.string() << ".{csv,svg}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xainav: attribution-explained navigation policy toolkit"};
  app.require_subcommand(1);
  Options o;

  auto seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "random seed"); };
  auto checkpoint = [&](CLI::App* c) {
    c->add_option("--checkpoint", o.checkpoint, "policy checkpoint (default $XAINAV_DATA_DIR/checkpoint.json)");
  };
  auto scenarios = [&](CLI::App* c) {
    c->add_option("--scenarios", o.scenarios, "scenario set JSON (default: generated from --seed)");
  };

  auto* train = app.add_subcommand("train", "train a policy with TD3");
  train->add_option("--config", o.config, "train config JSON")->check(CLI::ExistingFile);
  auto* steps = train->add_option("--steps", o.steps, "override total environment steps");
  train->add_flag("--full", o.full, "train for " + std::to_string(kFullTrainingSteps) + " steps")->excludes(steps);
  train->add_option("--out", o.out, "output directory");
  seed(train);

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  checkpoint(eval);
  eval->add_option("--scenarios", o.scenarios, "scene or scenario set (default: held-out random scenes)");
  eval->add_option("--episodes", o.episodes, "episodes to run");
  eval->add_option("--out", o.out, "write the table here instead of stdout");
  seed(eval);

  auto* scen = app.add_subcommand("scenarios", "generate study scenarios");
  scen->add_option("--count", o.count, "number of scenarios");
  scen->add_option("--out", o.out, "output file");
  seed(scen);

  auto* study = app.add_subcommand("study", "headless study with a baseline ranker");
  checkpoint(study);
  scenarios(study);
  study->add_option("--strategy", o.strategy, "oracle|proximity|path-proximity|front-cone|random");
  study->add_option("--participants", o.participants, "simulated participants");
  study->add_option("--tie-mode", o.tie_mode, "tie-broken|tie-aware");
  study->add_option("--out", o.out, "directory for records.csv and aggregate.csv");
  seed(study);

  auto* serve = app.add_subcommand("serve", "run the study server");
  checkpoint(serve);
  scenarios(serve);
  serve->add_option("--host", o.host, "bind address");
  serve->add_option("--port", o.port, "port");
  serve->add_option("--tie-mode", o.tie_mode, "tie-broken|tie-aware");
  serve->add_option("--log-dir", o.log_dir, "append per-session ranking logs here");
  seed(serve);

  auto* trace = app.add_subcommand("trace", "write attribution traces of study trials");
  checkpoint(trace);
  scenarios(trace);
  trace->add_option("--scenario", o.scenario, "scenario id, -1 for all")->default_val(-1);
  trace->add_option("--out", o.out, "output directory");
  seed(trace);

  auto* hist = app.add_subcommand("export-hist", "histograms of raw and processed attribution");
  hist->add_option("traces", o.traces, "trace CSV files")->required()->check(CLI::ExistingFile);
  hist->add_option("--bins", o.bins, "bins per histogram");
  hist->add_option("--out", o.out, "output prefix (.csv and .svg are appended)");

  auto* scene = app.add_subcommand("export-scene", "top-down attribution map of one trial frame");
  checkpoint(scene);
  scenarios(scene);
  scene->add_option("--scenario", o.scenario, "scenario id");
  scene->add_option("--timestep", o.timestep, "frame index (default: frozen frame)");
  scene->add_option("--out", o.out, "output prefix (.csv and .svg are appended)");
  seed(scene);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "xainav: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*train) return cmd_train(o);
    if (*eval) return cmd_eval(o);
    if (*scen) return cmd_scenarios(o);
    if (*study) return cmd_study(o);
    if (*serve) return cmd_serve(o);
    if (*trace) return cmd_trace(o);
    if (*hist) return cmd_export_hist(o);
    if (*scene) return cmd_export_scene(o);
  } catch (const std::exception& e) {
    std::cerr << "xainav: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
