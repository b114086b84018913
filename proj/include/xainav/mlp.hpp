#pragma once
/**
 * @file mlp.hpp
 * @brief Dense multilayer perceptron with hand-written backpropagation.
 *
 * Samples are stored column-wise: a batch of B inputs is an (in_dim x B)
 * matrix. Backward passes take the upstream gradient dL/dY and return both
 * parameter gradients and dL/dX, so the same code serves training (critic
 * and actor updates) and attribution (input gradients).
 *
 * The scalar type is a template parameter. Training runs in float; gradient
 * checks and attribution run in double.
 */

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xainav {

enum class Activation { kIdentity, kRelu, kTanh };

inline std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    case Activation::kIdentity: break;
  }
  return "identity";
}

inline Activation activation_from_string(std::string_view s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "tanh") return Activation::kTanh;
  if (s == "identity") return Activation::kIdentity;
  throw std::invalid_argument("unknown activation '" + std::string(s) + "'");
}

struct LayerSpec {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  Activation activation = Activation::kIdentity;
  bool operator==(const LayerSpec&) const = default;
};

/// Chains hidden layers with `hidden` activation and a final `output` layer.
inline std::vector<LayerSpec> chain_specs(std::size_t in_dim, std::span<const std::size_t> hidden,
                                          std::size_t out_dim, Activation hidden_act = Activation::kRelu,
                                          Activation out_act = Activation::kIdentity) {
  std::vector<LayerSpec> specs;
  std::size_t prev = in_dim;
  for (std::size_t h : hidden) {
    specs.push_back({prev, h, hidden_act});
    prev = h;
  }
  specs.push_back({prev, out_dim, out_act});
  return specs;
}

template <typename T>
class Mlp {
 public:
  using Scalar = T;
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  struct Layer {
    Matrix weights;  // out_dim x in_dim
    Vector bias;
    Activation activation = Activation::kIdentity;
  };

  /// Per-layer values kept from a forward pass for the backward pass.
  struct Cache {
    std::vector<Matrix> inputs;  // input to layer i
    std::vector<Matrix> outputs; // post-activation output of layer i
  };

  struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> bias;
    Matrix input;  // dL/dX

    Gradients& operator+=(const Gradients& o) {
      for (std::size_t i = 0; i < weights.size(); ++i) {
        weights[i] += o.weights[i];
        bias[i] += o.bias[i];
      }
      return *this;
    }
  };

  Mlp() = default;

  /// Zero-initialized network with the given layer chain.
  explicit Mlp(std::span<const LayerSpec> specs) {
    if (specs.empty()) throw std::invalid_argument("an MLP needs at least one layer");
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const auto& s = specs[i];
      if (s.in_dim == 0 || s.out_dim == 0) throw std::invalid_argument("layer dims must be positive");
      if (i > 0 && specs[i - 1].out_dim != s.in_dim)
        throw std::invalid_argument("layer dims do not chain at layer " + std::to_string(i));
      layers_.push_back({Matrix::Zero(Eigen::Index(s.out_dim), Eigen::Index(s.in_dim)),
                         Vector::Zero(Eigen::Index(s.out_dim)), s.activation});
    }
  }

  /// Uniform fan-in init U(-1/sqrt(in), 1/sqrt(in)) for weights and biases,
  /// with the last layer scaled by `final_scale`.
  template <typename Rng>
  static Mlp random(std::span<const LayerSpec> specs, Rng& rng, double final_scale = 1.0) {
    Mlp net(specs);
    for (std::size_t i = 0; i < net.layers_.size(); ++i) {
      auto& l = net.layers_[i];
      const double bound = 1.0 / std::sqrt(static_cast<double>(l.weights.cols()));
      const double scale = (i + 1 == net.layers_.size()) ? final_scale : 1.0;
      std::uniform_real_distribution<double> u(-bound, bound);
      for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
        for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = T(u(rng) * scale);
      for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = T(u(rng) * scale);
    }
    return net;
  }

  std::size_t input_dim() const { return std::size_t(layers_.front().weights.cols()); }
  std::size_t output_dim() const { return std::size_t(layers_.back().weights.rows()); }
  std::size_t num_layers() const { return layers_.size(); }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  std::vector<LayerSpec> specs() const {
    std::vector<LayerSpec> out;
    for (const auto& l : layers_)
      out.push_back({std::size_t(l.weights.cols()), std::size_t(l.weights.rows()), l.activation});
    return out;
  }

  bool finite() const {
    for (const auto& l : layers_)
      if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
    return true;
  }

  Matrix forward(const Matrix& x, Cache* cache = nullptr) const {
    if (std::size_t(x.rows()) != input_dim())
      throw std::invalid_argument("input has " + std::to_string(x.rows()) + " rows, expected " +
                                  std::to_string(input_dim()));
    if (cache) {
      cache->inputs.resize(layers_.size());
      cache->outputs.resize(layers_.size());
    }
    Matrix a = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const auto& l = layers_[i];
      Matrix z = l.weights * a;
      z.colwise() += l.bias;
      apply(l.activation, z);
      if (cache) {
        cache->inputs[i] = std::move(a);
        cache->outputs[i] = z;
      }
      a = std::move(z);
    }
    return a;
  }

  Vector forward_one(std::span<const double> x) const {
    Vector v(Eigen::Index(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) v(Eigen::Index(i)) = T(x[i]);
    return forward(v);
  }

  /// Backpropagates dL/dY (out_dim x B) through a cached forward pass.
  Gradients backward(const Cache& cache, const Matrix& grad_output, bool want_params = true) const {
    Gradients g;
    if (want_params) {
      g.weights.resize(layers_.size());
      g.bias.resize(layers_.size());
    }
    Matrix delta = grad_output;
    for (std::size_t k = layers_.size(); k-- > 0;) {
      const auto& l = layers_[k];
      apply_derivative(l.activation, cache.outputs[k], delta);
      if (want_params) {
        g.weights[k] = delta * cache.inputs[k].transpose();
        g.bias[k] = delta.rowwise().sum();
      }
      delta = l.weights.transpose() * delta;
    }
    g.input = std::move(delta);
    return g;
  }

  /// d output[output_index] / d x for a single input.
  Vector input_gradient(std::span<const double> x, std::size_t output_index) const {
    if (output_index >= output_dim()) throw std::out_of_range("output index");
    Vector v(Eigen::Index(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) v(Eigen::Index(i)) = T(x[i]);
    Cache cache;
    forward(v, &cache);
    Matrix seed = Matrix::Zero(Eigen::Index(output_dim()), 1);
    seed(Eigen::Index(output_index), 0) = T(1);
    return backward(cache, seed, false).input.col(0);
  }

  /// Parameter gradients of sum_b <seed_b, y_b> over a batch.
  Gradients param_gradient(const Matrix& x, const Matrix& seed) const {
    Cache cache;
    forward(x, &cache);
    return backward(cache, seed, true);
  }

  Gradients zero_gradients() const {
    Gradients g;
    for (const auto& l : layers_) {
      g.weights.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
      g.bias.push_back(Vector::Zero(l.bias.size()));
    }
    return g;
  }

  /// this <- tau * source + (1 - tau) * this
  void soft_update_from(const Mlp& source, T tau) {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      layers_[i].weights = tau * source.layers_[i].weights + (T(1) - tau) * layers_[i].weights;
      layers_[i].bias = tau * source.layers_[i].bias + (T(1) - tau) * layers_[i].bias;
    }
  }

  template <typename U>
  Mlp<U> cast() const {
    Mlp<U> out(specs());
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      out.layers()[i].weights = layers_[i].weights.template cast<U>();
      out.layers()[i].bias = layers_[i].bias.template cast<U>();
    }
    return out;
  }

 private:
  static void apply(Activation act, Matrix& z) {
    switch (act) {
      case Activation::kRelu: z = z.cwiseMax(T(0)); break;
      case Activation::kTanh: z = z.array().tanh().matrix(); break;
      case Activation::kIdentity: break;
    }
  }

  // delta <- delta * f'(z), written in terms of the activation output y
  static void apply_derivative(Activation act, const Matrix& y, Matrix& delta) {
    switch (act) {
      case Activation::kRelu:
        delta = (y.array() > T(0)).select(delta, T(0));
        break;
      case Activation::kTanh:
        delta.array() *= (T(1) - y.array().square());
        break;
      case Activation::kIdentity: break;
    }
  }

  std::vector<Layer> layers_;
};

/// Adam with bias correction, one moment pair per parameter tensor.
template <typename T>
class Adam {
 public:
  using Net = Mlp<T>;

  Adam() = default;
  Adam(const Net& net, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(net.zero_gradients()),
        v_(net.zero_gradients()) {}

  /// Descends along `grad` (gradient of the loss to minimize).
  void step(Net& net, const typename Net::Gradients& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, double(t_));
    const double c2 = 1.0 - std::pow(beta2_, double(t_));
    const T step_size = T(lr_ * std::sqrt(c2) / c1);
    const T b1 = T(beta1_), b2 = T(beta2_), eps = T(eps_ * std::sqrt(c2));
    auto& layers = net.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
      update(layers[i].weights, grad.weights[i], m_.weights[i], v_.weights[i], b1, b2, step_size, eps);
      update(layers[i].bias, grad.bias[i], m_.bias[i], v_.bias[i], b1, b2, step_size, eps);
    }
  }

  long steps() const { return t_; }

 private:
  template <typename P, typename G>
  static void update(P& param, const G& g, G& m, G& v, T b1, T b2, T step_size, T eps) {
    m = b1 * m + (T(1) - b1) * g;
    v.array() = b2 * v.array() + (T(1) - b2) * g.array().square();
    param.array() -= step_size * m.array() / (v.array().sqrt() + eps);
  }

  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long t_ = 0;
  typename Net::Gradients m_;
  typename Net::Gradients v_;
};

}  // namespace xainav
