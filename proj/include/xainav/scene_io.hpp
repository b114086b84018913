#pragma once
/**
 * @file scene_io.hpp
 * @brief JSON scene files.
 *
 * Schema ("format": "xainav.scene", "version": 1):
 *
 *   {
 *     "format": "xainav.scene", "version": 1, "seed": 42,
 *     "bounds": {"min": [-5, -5], "max": [5, 5]},
 *     "start": {"position": [x, y], "heading": rad},
 *     "goal": [x, y],
 *     "observer": [x, y],                      (optional)
 *     "obstacles": [
 *       {"id": 0, "type": "rect",   "center": [x, y], "half_extents": [hx, hy]},
 *       {"id": 1, "type": "circle", "center": [x, y], "radius": r}
 *     ]
 *   }
 *
 * A scenario set file wraps several scenes:
 *   {"format": "xainav.scenarios", "version": 1, "scenarios": [{"id": 0, "scene": {...}}, ...]}
 */

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xainav/geometry.hpp"
#include "xainav/study.hpp"

namespace xainav {

inline constexpr const char* kSceneFormat = "xainav.scene";
inline constexpr const char* kScenarioSetFormat = "xainav.scenarios";

inline nlohmann::json vec_json(Vec2 v) { return nlohmann::json::array({v.x, v.y}); }

inline Vec2 vec_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected a [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline nlohmann::json obstacle_json(const Obstacle& o) {
  if (const auto* c = std::get_if<Circle>(&o.shape))
    return {{"id", o.id}, {"type", "circle"}, {"center", vec_json(c->center)}, {"radius", c->radius}};
  const auto& r = std::get<Rect>(o.shape);
  return {{"id", o.id}, {"type", "rect"}, {"center", vec_json(r.center)}, {"half_extents", vec_json(r.half_extents)}};
}

inline Obstacle obstacle_from_json(const nlohmann::json& j) {
  Obstacle o;
  o.id = j.at("id").get<ObstacleId>();
  const auto type = j.at("type").get<std::string>();
  if (type == "circle")
    o.shape = Circle{vec_from_json(j.at("center")), j.at("radius").get<double>()};
  else if (type == "rect")
    o.shape = Rect{vec_from_json(j.at("center")), vec_from_json(j.at("half_extents"))};
  else
    throw std::invalid_argument("unknown obstacle type '" + type + "'");
  return o;
}

inline nlohmann::json scene_json(const Scene& s) {
  nlohmann::json obstacles = nlohmann::json::array();
  for (const auto& o : s.obstacles) obstacles.push_back(obstacle_json(o));
  return {{"format", kSceneFormat},
          {"version", 1},
          {"seed", s.seed},
          {"bounds", {{"min", vec_json(s.bounds.min)}, {"max", vec_json(s.bounds.max)}}},
          {"start", {{"position", vec_json(s.robot_start.position)}, {"heading", s.robot_start.heading}}},
          {"goal", vec_json(s.goal)},
          {"observer", vec_json(s.observer_position)},
          {"obstacles", std::move(obstacles)}};
}

/// Parses and validates a scene; throws std::invalid_argument on bad input.
inline Scene scene_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != kSceneFormat) throw std::invalid_argument("not a scene (format tag)");
    if (j.at("version") != 1) throw std::invalid_argument("unsupported scene version");
    Scene s;
    s.seed = j.value("seed", std::uint64_t{0});
    s.bounds = {vec_from_json(j.at("bounds").at("min")), vec_from_json(j.at("bounds").at("max"))};
    s.robot_start = Pose{vec_from_json(j.at("start").at("position")), j.at("start").at("heading").get<double>()};
    s.goal = vec_from_json(j.at("goal"));
    if (j.contains("observer")) s.observer_position = vec_from_json(j.at("observer"));
    for (const auto& o : j.at("obstacles")) s.obstacles.push_back(obstacle_from_json(o));
    validate_scene(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed scene: ") + e.what());
  }
}

inline nlohmann::json scenarios_json(const std::vector<Scenario>& scenarios) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : scenarios) arr.push_back({{"id", s.id}, {"scene", scene_json(s.scene)}});
  return {{"format", kScenarioSetFormat}, {"version", 1}, {"scenarios", std::move(arr)}};
}

/// Accepts a scenario set or a single scene (which becomes scenario 0).
inline std::vector<Scenario> scenarios_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") == kSceneFormat) return {Scenario{0, scene_from_json(j)}};
    if (j.value("format", "") != kScenarioSetFormat) throw std::invalid_argument("not a scenario set (format tag)");
    std::vector<Scenario> out;
    for (const auto& s : j.at("scenarios")) out.push_back({s.at("id").get<int>(), scene_from_json(s.at("scene"))});
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed scenario set: ") + e.what());
  }
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

inline std::vector<Scenario> load_scenarios(const std::filesystem::path& path) {
  return scenarios_from_json(read_json_file(path));
}

}  // namespace xainav
