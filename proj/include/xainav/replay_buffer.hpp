#pragma once

#include <array>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "xainav/world.hpp"

namespace xainav {

struct Transition {
  StateVector state{};
  std::array<double, kActionDim> action{};  // tanh-space action in [-1, 1]
  double reward = 0.0;
  StateVector next_state{};
  bool terminal = false;
  Action prev_action;       // a_{t-1}
  Action prev_prev_action;  // a_{t-2}
};

/// Fixed-capacity ring buffer; the oldest transition is overwritten first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
    data_.reserve(std::min<std::size_t>(capacity, 1 << 20));
  }

  void add(const Transition& t) {
    if (data_.size() < capacity_) {
      data_.push_back(t);
    } else {
      data_[head_] = t;
    }
    head_ = (head_ + 1) % capacity_;
    ++inserted_;
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t total_inserted() const { return inserted_; }
  const Transition& operator[](std::size_t i) const { return data_.at(i); }

  /// Distinct indices, uniform over the stored transitions.
  template <typename Rng>
  std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const {
    if (batch > data_.size()) throw std::invalid_argument("batch larger than buffer");
    std::vector<std::size_t> out;
    out.reserve(batch);
    // Floyd's algorithm: distinct draws without materializing a permutation
    std::unordered_set<std::size_t> seen;
    const std::size_t n = data_.size();
    for (std::size_t j = n - batch; j < n; ++j) {
      std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
      if (!seen.insert(t).second) {
        seen.insert(j);
        t = j;
      }
      out.push_back(t);
    }
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::size_t inserted_ = 0;
  std::vector<Transition> data_;
};

}  // namespace xainav
