#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ia_arena/random.hpp"

namespace ia_arena::rl {

// States are flattened (T, m, 4) windows in original seller order.
struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
};

// Fixed-capacity ring; once full, each push evicts the oldest transition.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return count_; }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t pushed() const { return pushed_; }
  // 0 is the oldest retained transition.
  const Transition& at(std::size_t i) const;
  // Uniform with replacement.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;
  void clear();

 private:
  std::size_t capacity_;
  std::vector<Transition> ring_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  std::uint64_t pushed_ = 0;
};

}  // namespace ia_arena::rl
