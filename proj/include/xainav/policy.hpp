#pragma once
/**
 * @file policy.hpp
 * @brief The navigation actor (17 -> 256 -> 128 -> 64 -> 2) with bounded
 * velocity heads, its twin-critic counterpart, and the checkpoint format.
 *
 * The actor's two identity outputs are logits z. The bounded commands are
 *   v     = v_max * (tanh(z_v) + 1) / 2   in [0, v_max]
 *   omega = w_max * tanh(z_w)             in [-w_max, w_max]
 * Input gradients are taken through the squashing so they are derivatives of
 * the commanded velocity itself.
 */

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "xainav/mlp.hpp"
#include "xainav/world.hpp"

namespace xainav {

inline constexpr std::array<std::size_t, 3> kHiddenSizes = {256, 128, 64};
inline constexpr double kActorFinalScale = 1e-2;

enum class VelocityOutput : std::size_t { kLinear = 0, kAngular = 1 };

inline std::vector<LayerSpec> actor_specs() {
  return chain_specs(kStateDim, kHiddenSizes, kActionDim);
}

inline std::vector<LayerSpec> critic_specs() {
  return chain_specs(kStateDim + kActionDim, kHiddenSizes, 1);
}

/// Maps tanh-space actions in [-1, 1]^2 to velocity commands.
inline Action denormalize_action(double v_unit, double omega_unit) {
  return Action{kMaxLinearVelocity * (v_unit + 1.0) * 0.5, kMaxAngularVelocity * omega_unit}.clamped();
}

inline std::array<double, 2> normalize_action(const Action& a) {
  return {2.0 * a.v / kMaxLinearVelocity - 1.0, a.omega / kMaxAngularVelocity};
}

struct PolicyOutput {
  std::array<double, 2> logits{};
  std::array<double, 2> unit{};  // tanh(logits)
  Action action;                 // bounded velocity commands
};

template <typename T>
class Policy {
 public:
  using Net = Mlp<T>;

  Policy() : net_(std::span<const LayerSpec>(actor_specs())) {}
  explicit Policy(Net net) : net_(std::move(net)) { check_architecture(net_); }

  template <typename Rng>
  static Policy random(Rng& rng) {
    const auto specs = actor_specs();
    return Policy(Net::random(specs, rng, kActorFinalScale));
  }

  static void check_architecture(const Net& net) {
    if (net.specs() != actor_specs())
      throw std::invalid_argument("actor must be 17-256-128-64-2 with relu hidden layers");
  }

  const Net& net() const { return net_; }
  Net& net() { return net_; }

  PolicyOutput forward(const StateVector& s) const {
    for (double x : s)
      if (!std::isfinite(x)) throw std::invalid_argument("policy input must be finite");
    const auto z = net_.forward_one(s);
    PolicyOutput out;
    for (int i = 0; i < 2; ++i) {
      out.logits[std::size_t(i)] = double(z(i));
      out.unit[std::size_t(i)] = std::tanh(double(z(i)));
    }
    out.action = denormalize_action(out.unit[0], out.unit[1]);
    return out;
  }

  Action act(const StateVector& s) const { return forward(s).action; }

  /// Derivative of the bounded velocity command with respect to all 17 inputs.
  std::array<double, kStateDim> input_gradient(const StateVector& s, VelocityOutput which) const {
    const std::size_t idx = static_cast<std::size_t>(which);
    const auto raw = net_.input_gradient(s, idx);
    const double z = double(net_.forward_one(s)(Eigen::Index(idx)));
    const double th = std::tanh(z);
    const double scale = (which == VelocityOutput::kLinear ? 0.5 * kMaxLinearVelocity : kMaxAngularVelocity) *
                         (1.0 - th * th);
    std::array<double, kStateDim> g{};
    for (std::size_t i = 0; i < kStateDim; ++i) g[i] = double(raw(Eigen::Index(i))) * scale;
    return g;
  }

  template <typename U>
  Policy<U> cast() const {
    return Policy<U>(net_.template cast<U>());
  }

 private:
  Net net_;
};

// ---------------------------------------------------------------------------
// Checkpoints: JSON with layer dims, activation and row-major weights.

inline constexpr const char* kCheckpointFormat = "xainav.checkpoint";
inline constexpr int kCheckpointVersion = 1;

template <typename T>
nlohmann::json net_to_json(const Mlp<T>& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : net.layers()) {
    std::vector<double> w;
    w.reserve(std::size_t(l.weights.size()));
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) w.push_back(double(l.weights(r, c)));
    std::vector<double> b(std::size_t(l.bias.size()));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) b[std::size_t(r)] = double(l.bias(r));
    layers.push_back({{"in", l.weights.cols()},
                      {"out", l.weights.rows()},
                      {"activation", std::string(to_string(l.activation))},
                      {"weights", std::move(w)},
                      {"bias", std::move(b)}});
  }
  return {{"format", kCheckpointFormat}, {"version", kCheckpointVersion}, {"layers", std::move(layers)}};
}

template <typename T>
Mlp<T> net_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != kCheckpointFormat)
    throw std::runtime_error("not a checkpoint: missing format tag");
  if (j.value("version", 0) != kCheckpointVersion)
    throw std::runtime_error("unsupported checkpoint version");
  std::vector<LayerSpec> specs;
  for (const auto& l : j.at("layers"))
    specs.push_back({l.at("in").get<std::size_t>(), l.at("out").get<std::size_t>(),
                     activation_from_string(l.at("activation").get<std::string>())});
  Mlp<T> net(specs);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& l = j.at("layers")[i];
    const auto w = l.at("weights").get<std::vector<double>>();
    const auto b = l.at("bias").get<std::vector<double>>();
    auto& layer = net.layers()[i];
    if (w.size() != std::size_t(layer.weights.size()) || b.size() != std::size_t(layer.bias.size()))
      throw std::runtime_error("checkpoint layer " + std::to_string(i) + " has wrong parameter count");
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = T(w[k++]);
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = T(b[std::size_t(r)]);
  }
  if (!net.finite()) throw std::runtime_error("checkpoint contains non-finite parameters");
  return net;
}

template <typename T>
void save_policy(const Policy<T>& policy, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << net_to_json(policy.net()).dump();
}

inline Policy<double> load_policy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed checkpoint " + path.string() + ": " + e.what());
  }
  return Policy<double>(net_from_json<double>(j));
}

}  // namespace xainav
