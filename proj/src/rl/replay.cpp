#include "ia_arena/rl/replay.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ia_arena::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
  ring_.reserve(std::min<std::size_t>(capacity, 4096));
}

void ReplayBuffer::push(Transition t) {
  const double total = std::accumulate(t.action.begin(), t.action.end(), 0.0);
  if (t.action.empty() || std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("transition action is not a feasible allocation");
  }
  if (!(t.reward >= 0.0 && t.reward <= 0.25 + 1e-12)) {
    throw std::invalid_argument("transition reward outside [0, 0.25]");
  }
  if (ring_.size() < capacity_) {
    ring_.push_back(std::move(t));
  } else {
    ring_[head_] = std::move(t);
  }
  head_ = (head_ + 1) % capacity_;
  count_ = std::min(count_ + 1, capacity_);
  ++pushed_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= count_) throw std::out_of_range("replay index out of range");
  const std::size_t oldest = count_ < capacity_ ? 0 : head_;
  return ring_[(oldest + i) % capacity_];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  if (count_ == 0) throw std::logic_error("sampling from an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, count_ - 1);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

void ReplayBuffer::clear() {
  ring_.clear();
  head_ = 0;
  count_ = 0;
}

}  // namespace ia_arena::rl
