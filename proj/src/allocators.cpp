#include "ia_arena/allocators.hpp"

#include <stdexcept>

#include "ia_arena/rl/ddpg.hpp"
#include "ia_arena/rl/iagru.hpp"

namespace ia_arena {

Allocation LinUcbAllocator::act(const MarketState& state, Phase, int, Rng&) {
  const auto features = latest_features(state);
  LinUcbChoice choice = linucb_choose(state_, features);
  last_arm_ = choice.arm;
  last_features_ = features[choice.arm];
  return choice.allocation;
}

std::optional<double> LinUcbAllocator::observe(const MarketState&, const Allocation&,
                                               double reward, const MarketState&, Phase, Rng&) {
  if (last_arm_ < 0) throw std::logic_error("linucb observe without a preceding act");
  linucb_update(state_, last_arm_, last_features_, reward);
  last_arm_ = -1;
  return std::nullopt;
}

Allocation RlAllocator::act(const MarketState& state, Phase phase, int episode, Rng& noise) {
  switch (phase) {
    case Phase::Prefill: return greedy_myopic(state);
    case Phase::Train: return rl::explore(agent_->act(state), episode, noise_, noise);
    case Phase::Eval: return agent_->act(state);
  }
  throw std::logic_error("unhandled phase");
}

std::optional<double> RlAllocator::observe(const MarketState& state, const Allocation& q,
                                           double reward, const MarketState& next, Phase phase,
                                           Rng& replay_rng) {
  if (phase == Phase::Eval) return std::nullopt;
  const auto s = state.flat();
  const auto s2 = next.flat();
  agent_->remember({std::vector<double>(s.begin(), s.end()),
                    std::vector<double>(q.values().begin(), q.values().end()), reward,
                    std::vector<double>(s2.begin(), s2.end())});
  if (phase == Phase::Prefill) return std::nullopt;
  if (agent_->buffer().size() < static_cast<std::size_t>(agent_->config().batch_size)) {
    return std::nullopt;
  }
  return agent_->train_step(replay_rng);
}

std::unique_ptr<rl::ActorCriticAgent> make_agent(AllocatorKind kind, const ExperimentConfig& config,
                                                 int sellers, Rng& init_rng) {
  rl::AgentConfig ac = config.agent;
  ac.sellers = sellers;
  ac.window = config.window;
  switch (kind) {
    case AllocatorKind::Ddpg: return std::make_unique<rl::DdpgAgent>(ac, init_rng);
    case AllocatorKind::IaGru: return std::make_unique<rl::IaGruAgent>(ac, init_rng);
    default: throw std::invalid_argument("not a learning allocator");
  }
}

std::unique_ptr<Allocator> make_allocator(AllocatorKind kind, const ExperimentConfig& config,
                                          int sellers, Rng& init_rng) {
  switch (kind) {
    case AllocatorKind::Greedy: return std::make_unique<GreedyAllocator>();
    case AllocatorKind::LinUcb:
      return std::make_unique<LinUcbAllocator>(sellers, config.linucb_alpha);
    case AllocatorKind::Ddpg:
    case AllocatorKind::IaGru:
      return std::make_unique<RlAllocator>(make_agent(kind, config, sellers, init_rng),
                                           config.noise);
  }
  throw std::invalid_argument("unhandled allocator kind");
}

}  // namespace ia_arena
