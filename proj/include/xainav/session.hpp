#pragma once
/**
 * @file session.hpp
 * @brief Transport-independent study service: sessions, the per-trial phase
 * machine, server-side tau scoring and result aggregation.
 *
 * Phase machine of the active trial:
 *
 *   idle --next_trial--> running --(first linger frame)--> linger
 *        --(stream finished)--> awaiting-ranking --submit--> ranked
 *   ranked --submit--> ranked (revision)    ranked --next_trial--> running
 *
 * Frames for every scenario are simulated once up front, so every session
 * streams byte-identical packets for the same scenario.
 */

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "xainav/protocol.hpp"
#include "xainav/study.hpp"

namespace xainav {

enum class ErrorCode { kUnknownSession, kOutOfPhase, kMalformedRanking, kBadRequest, kStudyComplete };

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::kUnknownSession: return "unknown_session";
    case ErrorCode::kOutOfPhase: return "out_of_phase";
    case ErrorCode::kMalformedRanking: return "malformed_ranking";
    case ErrorCode::kBadRequest: return "bad_request";
    case ErrorCode::kStudyComplete: return "study_complete";
  }
  return "error";
}

inline int http_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::kUnknownSession: return 404;
    case ErrorCode::kOutOfPhase: return 409;
    case ErrorCode::kMalformedRanking: return 422;
    case ErrorCode::kStudyComplete: return 409;
    case ErrorCode::kBadRequest: break;
  }
  return 400;
}

class ServiceError : public std::runtime_error {
 public:
  ServiceError(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }
  wire::ErrorMessage message() const { return {std::string(to_string(code_)), what()}; }

 private:
  ErrorCode code_;
};

enum class SessionPhase { kIdle, kRunning, kLinger, kAwaitingRanking, kRanked };

struct ServiceConfig {
  std::uint64_t plan_seed = 1;
  int trials_per_block = kTrialsPerBlock;
  TieMode tie_mode = TieMode::kTieBroken;
  std::optional<std::filesystem::path> log_dir;  // one JSON-lines file per session
};

class StudyService {
 public:
  StudyService(Policy<double> policy, std::vector<Scenario> scenarios, ServiceConfig cfg = {})
      : policy_(std::move(policy)), scenarios_(std::move(scenarios)), cfg_(std::move(cfg)) {
    if (int(scenarios_.size()) < kBlocks * cfg_.trials_per_block)
      throw std::invalid_argument("service needs at least " + std::to_string(kBlocks * cfg_.trials_per_block) +
                                  " scenarios");
    for (std::size_t i = 0; i < scenarios_.size(); ++i) {
      validate_scene(scenarios_[i].scene, true);
      if (scenarios_[i].id != int(i)) throw std::invalid_argument("scenario ids must be 0..n-1 in order");
      trials_.push_back(run_trial(policy_, scenarios_[i], Condition{}));
    }
  }

  const std::vector<Scenario>& scenarios() const { return scenarios_; }
  const TrialRecord& trial_record(int scenario) const { return trials_.at(std::size_t(scenario)); }

  wire::SessionInfo create_session(int participant) {
    if (participant < 0) throw ServiceError(ErrorCode::kBadRequest, "participant id must be non-negative");
    auto s = std::make_shared<Session>();
    s->plan = make_plan(participant, cfg_.plan_seed, int(scenarios_.size()), cfg_.trials_per_block);
    s->id = "s" + std::to_string(participant) + "-" + std::to_string(++counter_);
    {
      std::unique_lock lock(sessions_mutex_);
      sessions_[s->id] = s;
    }
    std::lock_guard guard(s->mutex);
    return info(*s);
  }

  wire::SessionInfo session_info(const std::string& id) {
    auto s = find(id);
    std::lock_guard guard(s->mutex);
    return info(*s);
  }

  /// Starts the next trial; the current one must be ranked first.
  wire::TrialInfo next_trial(const std::string& id) {
    auto s = find(id);
    std::lock_guard guard(s->mutex);
    if (s->phase != SessionPhase::kIdle && s->phase != SessionPhase::kRanked)
      throw ServiceError(ErrorCode::kOutOfPhase, "current trial has not been ranked yet");
    if (s->cursor >= s->plan.total_trials()) throw ServiceError(ErrorCode::kStudyComplete, "all trials are done");
    s->active = s->cursor++;
    s->phase = SessionPhase::kRunning;
    return trial_info(*s);
  }

  /// Throws unless `id` names a session with a trial in progress.
  void require_active_trial(const std::string& id) {
    auto s = find(id);
    std::lock_guard guard(s->mutex);
    if (!s->active) throw ServiceError(ErrorCode::kOutOfPhase, "no active trial; call next-trial first");
  }

  /// Streams the active trial's frames to `sink`, sleeping `period` between
  /// frames. The sink returns false to abort (client gone). Phase advances as
  /// frames go out and never moves backwards; a repeated stream replays the
  /// same packets.
  void stream_frames(const std::string& id, const std::function<bool(const wire::FramePacket&)>& sink,
                     std::chrono::milliseconds period = std::chrono::milliseconds(100)) {
    auto s = find(id);
    std::vector<wire::FramePacket> frames;
    {
      std::lock_guard guard(s->mutex);
      if (!s->active) throw ServiceError(ErrorCode::kOutOfPhase, "no active trial; call next-trial first");
      frames = frames_for(*s);
    }
    for (std::size_t i = 0; i < frames.size(); ++i) {
      if (i > 0 && period.count() > 0) std::this_thread::sleep_for(period);
      {
        std::lock_guard guard(s->mutex);
        if (frames[i].phase == wire::Phase::kLinger) advance(*s, SessionPhase::kLinger);
      }
      if (!sink(frames[i])) return;
    }
    std::lock_guard guard(s->mutex);
    advance(*s, SessionPhase::kAwaitingRanking);
  }

  std::vector<wire::FramePacket> collect_frames(const std::string& id) {
    std::vector<wire::FramePacket> out;
    stream_frames(id, [&](const wire::FramePacket& p) { out.push_back(p); return true; },
                  std::chrono::milliseconds(0));
    return out;
  }

  /// Scores a ranking for the active trial. Resubmission replaces the
  /// previous ranking until the session moves on.
  wire::RankingResult submit_ranking(const std::string& id, const wire::RankingSubmission& sub) {
    auto s = find(id);
    std::lock_guard guard(s->mutex);
    if (!s->active || sub.trial != *s->active)
      throw ServiceError(ErrorCode::kOutOfPhase, "ranking is not for the active trial");
    if (s->phase != SessionPhase::kAwaitingRanking && s->phase != SessionPhase::kRanked)
      throw ServiceError(ErrorCode::kOutOfPhase, "trial is still playing");
    const auto [block, in_block] = locate(s->plan, *s->active);
    const int scenario = s->plan.blocks[std::size_t(block)][std::size_t(in_block)];
    const auto& truth = trials_[std::size_t(scenario)].ground_truth;
    double tau = 0.0;
    try {
      tau = ranking_tau(sub.ranking, truth, cfg_.tie_mode);
    } catch (const std::invalid_argument& e) {
      throw ServiceError(ErrorCode::kMalformedRanking, e.what());
    }
    ScoredTrial rec{s->plan.participant, block, s->plan.block_order[std::size_t(block)], in_block, scenario, tau};
    int revision = 0;
    if (s->phase == SessionPhase::kRanked) {
      revision = ++s->revisions;
      s->records.back() = rec;
    } else {
      s->revisions = 0;
      s->records.push_back(rec);
    }
    s->phase = SessionPhase::kRanked;
    log(*s, rec, sub.ranking, revision);
    return {sub.trial, tau, truth.ranking, revision};
  }

  wire::Results results(const std::string& id) {
    auto s = find(id);
    std::lock_guard guard(s->mutex);
    wire::Results r{s->id, int(s->records.size()), {}};
    if (s->records.empty()) return r;
    for (const auto& c : aggregate(s->records).conditions)
      r.conditions.push_back({c.condition, int(c.n), c.mean, c.sd});
    return r;
  }

  std::string export_csv(const std::string& id) {
    auto s = find(id);
    std::lock_guard guard(s->mutex);
    return records_csv(s->records);
  }

  SessionPhase phase(const std::string& id) {
    auto s = find(id);
    std::lock_guard guard(s->mutex);
    return s->phase;
  }

 private:
  struct Session {
    std::mutex mutex;
    std::string id;
    StudyPlan plan;
    int cursor = 0;             // next trial to start
    std::optional<int> active;  // trial currently shown
    SessionPhase phase = SessionPhase::kIdle;
    int revisions = 0;
    std::vector<ScoredTrial> records;
  };

  std::shared_ptr<Session> find(const std::string& id) {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ServiceError(ErrorCode::kUnknownSession, "unknown session '" + id + "'");
    return it->second;
  }

  static std::pair<int, int> locate(const StudyPlan& plan, int trial) {
    int b = 0;
    while (trial >= int(plan.blocks[std::size_t(b)].size())) trial -= int(plan.blocks[std::size_t(b++)].size());
    return {b, trial};
  }

  static void advance(Session& s, SessionPhase to) {
    if (int(to) > int(s.phase) && s.phase != SessionPhase::kRanked) s.phase = to;
  }

  wire::SessionInfo info(const Session& s) const {
    wire::SessionInfo i{s.id, s.plan.participant, {}, cfg_.trials_per_block, s.plan.total_trials(),
                        int(s.records.size())};
    for (const auto& c : s.plan.block_order) i.block_order.push_back(c);
    return i;
  }

  wire::TrialInfo trial_info(const Session& s) const {
    const auto [block, in_block] = locate(s.plan, *s.active);
    const int scenario = s.plan.blocks[std::size_t(block)][std::size_t(in_block)];
    wire::TrialInfo t;
    t.session_id = s.id;
    t.trial = *s.active;
    t.block = block;
    t.trial_in_block = in_block;
    t.condition = s.plan.block_order[std::size_t(block)];
    t.scenario_id = scenario;
    t.scene = scenarios_[std::size_t(scenario)].scene;
    return t;
  }

  std::vector<wire::FramePacket> frames_for(const Session& s) const {
    const auto t = trial_info(s);
    return wire::build_frames(trials_[std::size_t(t.scenario_id)], t.condition, t.trial);
  }

  void log(const Session& s, const ScoredTrial& r, const std::vector<ObstacleId>& ranking, int revision) const {
    if (!cfg_.log_dir) return;
    std::filesystem::create_directories(*cfg_.log_dir);
    std::ofstream out(*cfg_.log_dir / (s.id + ".jsonl"), std::ios::app);
    nlohmann::json j = {{"session", s.id},       {"participant", r.participant}, {"block", r.block},
                        {"condition", to_string(r.condition)}, {"trial", r.trial}, {"scenario", r.scenario},
                        {"ranking", ranking},    {"tau", r.tau},                 {"revision", revision}};
    out << j.dump() << '\n';
  }

  Policy<double> policy_;
  std::vector<Scenario> scenarios_;
  ServiceConfig cfg_;
  std::vector<TrialRecord> trials_;
  std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::atomic<int> counter_{0};
};

}  // namespace xainav
