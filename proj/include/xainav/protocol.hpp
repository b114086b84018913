#pragma once
/**
 * @file protocol.hpp
 * @brief Versioned JSON messages exchanged between the study service and a
 * trial client.
 *
 * Every message carries "type" and "version". Frame packets always include
 * both the lidar and the attribution channel; the condition only flips their
 * "hidden" markers, so a client renders whatever the server says is visible.
 *
 *   frame:   {"type":"frame","version":1,"trial":3,"timestep":12,"phase":"running",
 *             "pose":{"x":..,"y":..,"heading":..},"action":{"v":..,"omega":..},
 *             "condition":{"xai":true,"lidar":false},
 *             "lidar":{"hidden":true,"endpoints":[[x,y],...360],"hits":[true,...]},
 *             "xai":{"hidden":false,"g_star":[...15],
 *                    "objects":[{"id":0,"score":0.7,"outline_width":4.35},...]}}
 */

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "xainav/scene_io.hpp"
#include "xainav/study.hpp"

namespace xainav::wire {

inline constexpr int kProtocolVersion = 1;

enum class Phase { kRunning, kLinger, kAwaitingRanking };

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::kRunning: return "running";
    case Phase::kLinger: return "linger";
    case Phase::kAwaitingRanking: break;
  }
  return "awaiting-ranking";
}

inline Phase phase_from_string(std::string_view s) {
  if (s == "running") return Phase::kRunning;
  if (s == "linger") return Phase::kLinger;
  if (s == "awaiting-ranking") return Phase::kAwaitingRanking;
  throw std::invalid_argument("unknown phase '" + std::string(s) + "'");
}

class ProtocolError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------

struct ObjectOverlay {
  ObstacleId id = 0;
  double score = 0.0;
  double outline_width = 0.0;
  bool operator==(const ObjectOverlay&) const = default;
};

struct FramePacket {
  static constexpr const char* kType = "frame";
  int trial = 0;
  int timestep = 0;
  Phase phase = Phase::kRunning;
  Pose pose;
  Action action;
  Condition condition;
  bool lidar_hidden = true;
  std::vector<Vec2> ray_endpoints;
  std::vector<bool> ray_hits;
  bool xai_hidden = true;
  std::array<double, kNumSectors> g_star{};
  std::vector<ObjectOverlay> objects;
  bool operator==(const FramePacket&) const = default;
};

struct CreateSessionRequest {
  static constexpr const char* kType = "create-session";
  int participant_id = 0;
  bool operator==(const CreateSessionRequest&) const = default;
};

struct SessionInfo {
  static constexpr const char* kType = "session";
  std::string session_id;
  int participant_id = 0;
  std::vector<Condition> block_order;
  int trials_per_block = 0;
  int total_trials = 0;
  int completed_trials = 0;
  bool operator==(const SessionInfo&) const = default;
};

struct TrialInfo {
  static constexpr const char* kType = "trial";
  std::string session_id;
  int trial = 0;  // global index within the session
  int block = 0;
  int trial_in_block = 0;
  Condition condition;
  int scenario_id = 0;
  Scene scene;
  int run_frames = kRunTicks;
  int linger_frames = kLingerTicks;
  int frame_period_ms = 100;
  bool operator==(const TrialInfo&) const = default;
};

struct RankingSubmission {
  static constexpr const char* kType = "ranking";
  int trial = 0;
  std::vector<ObstacleId> ranking;
  bool operator==(const RankingSubmission&) const = default;
};

struct RankingResult {
  static constexpr const char* kType = "ranking-result";
  int trial = 0;
  double tau = 0.0;
  std::vector<ObstacleId> ground_truth;
  int revision = 0;  // 0 for the first submission of a trial
  bool operator==(const RankingResult&) const = default;
};

struct ConditionResult {
  Condition condition;
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;
  bool operator==(const ConditionResult&) const = default;
};

struct Results {
  static constexpr const char* kType = "results";
  std::string session_id;
  int completed_trials = 0;
  std::vector<ConditionResult> conditions;
  bool operator==(const Results&) const = default;
};

struct ErrorMessage {
  static constexpr const char* kType = "error";
  std::string code;
  std::string message;
  bool operator==(const ErrorMessage&) const = default;
};

// ---------------------------------------------------------------------------
// JSON mapping

namespace detail {

inline nlohmann::json header(const char* type) { return {{"type", type}, {"version", kProtocolVersion}}; }

inline void check_header(const nlohmann::json& j, const char* type) {
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  if (j.value("type", "") != type) throw ProtocolError(std::string("expected message type '") + type + "'");
  if (j.value("version", 0) != kProtocolVersion) throw ProtocolError("unsupported protocol version");
}

inline nlohmann::json condition_json(Condition c) { return {{"xai", c.xai_visible}, {"lidar", c.lidar_visible}}; }
inline Condition condition_from(const nlohmann::json& j) {
  return {j.at("xai").get<bool>(), j.at("lidar").get<bool>()};
}

}  // namespace detail

inline nlohmann::json to_json(const FramePacket& m) {
  auto j = detail::header(FramePacket::kType);
  nlohmann::json endpoints = nlohmann::json::array();
  for (const auto& p : m.ray_endpoints) endpoints.push_back(vec_json(p));
  nlohmann::json objects = nlohmann::json::array();
  for (const auto& o : m.objects) objects.push_back({{"id", o.id}, {"score", o.score}, {"outline_width", o.outline_width}});
  j["trial"] = m.trial;
  j["timestep"] = m.timestep;
  j["phase"] = to_string(m.phase);
  j["pose"] = {{"x", m.pose.position.x}, {"y", m.pose.position.y}, {"heading", m.pose.heading}};
  j["action"] = {{"v", m.action.v}, {"omega", m.action.omega}};
  j["condition"] = detail::condition_json(m.condition);
  j["lidar"] = {{"hidden", m.lidar_hidden}, {"endpoints", std::move(endpoints)}, {"hits", m.ray_hits}};
  j["xai"] = {{"hidden", m.xai_hidden}, {"g_star", m.g_star}, {"objects", std::move(objects)}};
  return j;
}

inline void from_json(const nlohmann::json& j, FramePacket& m) {
  detail::check_header(j, FramePacket::kType);
  m.trial = j.at("trial").get<int>();
  m.timestep = j.at("timestep").get<int>();
  m.phase = phase_from_string(j.at("phase").get<std::string>());
  const auto& p = j.at("pose");
  m.pose.position = {p.at("x").get<double>(), p.at("y").get<double>()};
  m.pose.heading = p.at("heading").get<double>();
  m.action = {j.at("action").at("v").get<double>(), j.at("action").at("omega").get<double>()};
  m.condition = detail::condition_from(j.at("condition"));
  const auto& l = j.at("lidar");
  m.lidar_hidden = l.at("hidden").get<bool>();
  m.ray_endpoints.clear();
  for (const auto& e : l.at("endpoints")) m.ray_endpoints.push_back(vec_from_json(e));
  m.ray_hits = l.at("hits").get<std::vector<bool>>();
  const auto& x = j.at("xai");
  m.xai_hidden = x.at("hidden").get<bool>();
  m.g_star = x.at("g_star").get<std::array<double, kNumSectors>>();
  m.objects.clear();
  for (const auto& o : x.at("objects"))
    m.objects.push_back({o.at("id").get<ObstacleId>(), o.at("score").get<double>(), o.at("outline_width").get<double>()});
}

inline nlohmann::json to_json(const CreateSessionRequest& m) {
  auto j = detail::header(CreateSessionRequest::kType);
  j["participant_id"] = m.participant_id;
  return j;
}

inline void from_json(const nlohmann::json& j, CreateSessionRequest& m) {
  detail::check_header(j, CreateSessionRequest::kType);
  m.participant_id = j.at("participant_id").get<int>();
}

inline nlohmann::json to_json(const SessionInfo& m) {
  auto j = detail::header(SessionInfo::kType);
  std::vector<std::string> order;
  for (const auto& c : m.block_order) order.push_back(to_string(c));
  j["session_id"] = m.session_id;
  j["participant_id"] = m.participant_id;
  j["block_order"] = order;
  j["trials_per_block"] = m.trials_per_block;
  j["total_trials"] = m.total_trials;
  j["completed_trials"] = m.completed_trials;
  return j;
}

inline void from_json(const nlohmann::json& j, SessionInfo& m) {
  detail::check_header(j, SessionInfo::kType);
  m.session_id = j.at("session_id").get<std::string>();
  m.participant_id = j.at("participant_id").get<int>();
  m.block_order.clear();
  for (const auto& c : j.at("block_order")) m.block_order.push_back(condition_from_string(c.get<std::string>()));
  m.trials_per_block = j.at("trials_per_block").get<int>();
  m.total_trials = j.at("total_trials").get<int>();
  m.completed_trials = j.at("completed_trials").get<int>();
}

inline nlohmann::json to_json(const TrialInfo& m) {
  auto j = detail::header(TrialInfo::kType);
  j["session_id"] = m.session_id;
  j["trial"] = m.trial;
  j["block"] = m.block;
  j["trial_in_block"] = m.trial_in_block;
  j["condition"] = detail::condition_json(m.condition);
  j["scenario_id"] = m.scenario_id;
  j["scene"] = scene_json(m.scene);
  j["run_frames"] = m.run_frames;
  j["linger_frames"] = m.linger_frames;
  j["frame_period_ms"] = m.frame_period_ms;
  return j;
}

inline void from_json(const nlohmann::json& j, TrialInfo& m) {
  detail::check_header(j, TrialInfo::kType);
  m.session_id = j.at("session_id").get<std::string>();
  m.trial = j.at("trial").get<int>();
  m.block = j.at("block").get<int>();
  m.trial_in_block = j.at("trial_in_block").get<int>();
  m.condition = detail::condition_from(j.at("condition"));
  m.scenario_id = j.at("scenario_id").get<int>();
  m.scene = scene_from_json(j.at("scene"));
  m.run_frames = j.at("run_frames").get<int>();
  m.linger_frames = j.at("linger_frames").get<int>();
  m.frame_period_ms = j.at("frame_period_ms").get<int>();
}

inline nlohmann::json to_json(const RankingSubmission& m) {
  auto j = detail::header(RankingSubmission::kType);
  j["trial"] = m.trial;
  j["ranking"] = m.ranking;
  return j;
}

inline void from_json(const nlohmann::json& j, RankingSubmission& m) {
  detail::check_header(j, RankingSubmission::kType);
  m.trial = j.at("trial").get<int>();
  m.ranking = j.at("ranking").get<std::vector<ObstacleId>>();
}

inline nlohmann::json to_json(const RankingResult& m) {
  auto j = detail::header(RankingResult::kType);
  j["trial"] = m.trial;
  j["tau"] = m.tau;
  j["ground_truth"] = m.ground_truth;
  j["revision"] = m.revision;
  return j;
}

inline void from_json(const nlohmann::json& j, RankingResult& m) {
  detail::check_header(j, RankingResult::kType);
  m.trial = j.at("trial").get<int>();
  m.tau = j.at("tau").get<double>();
  m.ground_truth = j.at("ground_truth").get<std::vector<ObstacleId>>();
  m.revision = j.at("revision").get<int>();
}

inline nlohmann::json to_json(const Results& m) {
  auto j = detail::header(Results::kType);
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : m.conditions)
    conds.push_back({{"condition", to_string(c.condition)}, {"n", c.n}, {"mean", c.mean}, {"sd", c.sd}});
  j["session_id"] = m.session_id;
  j["completed_trials"] = m.completed_trials;
  j["conditions"] = std::move(conds);
  return j;
}

inline void from_json(const nlohmann::json& j, Results& m) {
  detail::check_header(j, Results::kType);
  m.session_id = j.at("session_id").get<std::string>();
  m.completed_trials = j.at("completed_trials").get<int>();
  m.conditions.clear();
  for (const auto& c : j.at("conditions"))
    m.conditions.push_back({condition_from_string(c.at("condition").get<std::string>()), c.at("n").get<int>(),
                            c.at("mean").get<double>(), c.at("sd").get<double>()});
}

inline nlohmann::json to_json(const ErrorMessage& m) {
  auto j = detail::header(ErrorMessage::kType);
  j["code"] = m.code;
  j["message"] = m.message;
  return j;
}

inline void from_json(const nlohmann::json& j, ErrorMessage& m) {
  detail::check_header(j, ErrorMessage::kType);
  m.code = j.at("code").get<std::string>();
  m.message = j.at("message").get<std::string>();
}

template <typename Message>
std::string encode(const Message& m) {
  return to_json(m).dump();
}

/// Parses one message; any structural problem surfaces as ProtocolError.
template <typename Message>
Message decode(std::string_view text) {
  Message m;
  try {
    from_json(nlohmann::json::parse(text), m);
  } catch (const ProtocolError&) {
    throw;
  } catch (const std::exception& e) {
    throw ProtocolError(std::string("malformed ") + Message::kType + " message: " + e.what());
  }
  return m;
}

// ---------------------------------------------------------------------------

/// Frame packets for one trial: the recorded ticks padded to `run_frames`
/// running packets, then `linger_frames` copies of the frozen frame.
inline std::vector<FramePacket> build_frames(const TrialRecord& rec, Condition condition, int trial,
                                             int run_frames = kRunTicks, int linger_frames = kLingerTicks) {
  std::vector<FramePacket> out;
  auto packet = [&](const TrialFrame& f, int timestep, Phase phase, bool moving) {
    FramePacket p;
    p.trial = trial;
    p.timestep = timestep;
    p.phase = phase;
    p.pose = f.pose;
    p.action = moving ? f.action : Action{};
    p.condition = condition;
    p.lidar_hidden = !condition.lidar_visible;
    p.xai_hidden = !condition.xai_visible;
    const auto& raw = f.attribution.observation.raw;
    for (std::size_t k = 0; k < kNumRays; ++k) {
      p.ray_endpoints.push_back(f.pose.position + unit_from_angle(ray_angle(f.pose, k)) * raw.distances[k]);
      p.ray_hits.push_back(raw.hit_object[k].has_value());
    }
    p.g_star = f.attribution.processed.g_star;
    const auto& imp = f.attribution.importance;
    for (std::size_t i = 0; i < imp.scores.size(); ++i)
      p.objects.push_back({imp.scores[i].id, imp.scores[i].score, f.attribution.outline_widths[i]});
    return p;
  };
  int t = 0;
  for (; t < run_frames; ++t) {
    const bool recorded = std::size_t(t) < rec.frames.size();
    out.push_back(packet(recorded ? rec.frames[std::size_t(t)] : rec.frozen_frame(), t, Phase::kRunning, recorded));
  }
  for (int i = 0; i < linger_frames; ++i, ++t)
    out.push_back(packet(rec.frozen_frame(), t, Phase::kLinger, false));
  return out;
}

}  // namespace xainav::wire
