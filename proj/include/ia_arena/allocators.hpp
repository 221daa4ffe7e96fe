#pragma once

#include <memory>
#include <optional>
#include <string_view>

#include "ia_arena/baselines.hpp"
#include "ia_arena/config.hpp"
#include "ia_arena/rl/agent.hpp"

namespace ia_arena {

enum class Phase { Prefill, Train, Eval };

// Platform-side policy driven by the simulation loop.
class Allocator {
 public:
  virtual ~Allocator() = default;

  virtual std::string_view name() const = 0;
  virtual Allocation act(const MarketState& state, Phase phase, int episode, Rng& noise) = 0;
  // Feedback after the round; returns the critic loss when a training step ran.
  virtual std::optional<double> observe(const MarketState& state, const Allocation& q,
                                        double reward, const MarketState& next, Phase phase,
                                        Rng& replay_rng) = 0;
  virtual bool wants_prefill() const { return false; }
  virtual rl::ActorCriticAgent* agent() { return nullptr; }
};

class GreedyAllocator final : public Allocator {
 public:
  std::string_view name() const override { return "greedy"; }
  Allocation act(const MarketState& state, Phase, int, Rng&) override {
    return greedy_myopic(state);
  }
  std::optional<double> observe(const MarketState&, const Allocation&, double,
                                const MarketState&, Phase, Rng&) override {
    return std::nullopt;
  }
};

// Online disjoint LinUCB; keeps learning in every phase.
class LinUcbAllocator final : public Allocator {
 public:
  LinUcbAllocator(int sellers, double alpha) : state_(sellers, alpha) {}

  std::string_view name() const override { return "linucb"; }
  Allocation act(const MarketState& state, Phase, int, Rng&) override;
  std::optional<double> observe(const MarketState&, const Allocation&, double reward,
                                const MarketState&, Phase, Rng&) override;
  const LinUcbState& state() const { return state_; }

 private:
  LinUcbState state_;
  int last_arm_ = -1;
  Features last_features_ = Features::Zero();
};

// DDPG or IA(GRU): Greedy Myopic rollouts in the prefill phase, noisy
// actions and one train_step per round while training, the plain actor
// output (and no updates) in evaluation.
class RlAllocator final : public Allocator {
 public:
  RlAllocator(std::unique_ptr<rl::ActorCriticAgent> agent, rl::NoiseSchedule noise)
      : agent_(std::move(agent)), noise_(noise) {}

  std::string_view name() const override { return agent_->kind(); }
  Allocation act(const MarketState& state, Phase phase, int episode, Rng& noise) override;
  std::optional<double> observe(const MarketState& state, const Allocation& q, double reward,
                                const MarketState& next, Phase phase, Rng& replay_rng) override;
  bool wants_prefill() const override { return true; }
  rl::ActorCriticAgent* agent() override { return agent_.get(); }

 private:
  std::unique_ptr<rl::ActorCriticAgent> agent_;
  rl::NoiseSchedule noise_;
};

std::unique_ptr<rl::ActorCriticAgent> make_agent(AllocatorKind kind, const ExperimentConfig& config,
                                                 int sellers, Rng& init_rng);
std::unique_ptr<Allocator> make_allocator(AllocatorKind kind, const ExperimentConfig& config,
                                          int sellers, Rng& init_rng);

}  // namespace ia_arena
