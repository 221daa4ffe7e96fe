#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ia_arena/market.hpp"
#include "ia_arena/nn/checkpoint.hpp"
#include "ia_arena/nn/optim.hpp"
#include "ia_arena/nn/tape.hpp"
#include "ia_arena/rl/replay.hpp"

namespace ia_arena::rl {

using nn::Mat;

struct AgentConfig {
  int sellers = 0;
  int window = 1;
  double gamma = 0.99;
  double tau = 1e-3;
  double actor_lr = 1e-4;
  double critic_lr = 1e-4;
  int batch_size = 64;
  std::size_t buffer_capacity = 100000;
  // DDPG widths.
  int ddpg_hidden = 64;
  // IA(GRU) widths.
  int background_hidden = 32;
  int seller_hidden = 16;
  int head_hidden = 32;
  // Feed per-seller shares (impressions, transactions, revenue, action) to
  // the networks multiplied by m, so a uniform split reads as 1 at any m.
  bool share_scaling = true;
};

// Gaussian action noise whose mean decays geometrically with the episode.
struct NoiseSchedule {
  double initial_mean = 0.2;
  double decay = 0.995;
  double stddev = 0.1;

  double mean(int episode) const;
};

// q'_i = max(0, q_i + eta_i), renormalised; uniform if every entry clips.
Allocation explore(const Allocation& q, int episode, const NoiseSchedule& noise, Rng& rng);

struct Minibatch {
  Mat states;       // B x (T*m*4)
  Mat actions;      // B x m
  Mat rewards;      // B x 1
  Mat next_states;  // B x (T*m*4)
};

// Deterministic actor-critic with target networks, experience replay and
// Adam, shared by the DDPG and IA(GRU) allocators. Subclasses supply the
// networks and optionally a canonical seller ordering.
class ActorCriticAgent {
 public:
  virtual ~ActorCriticAgent() = default;

  virtual std::string_view kind() const = 0;
  const AgentConfig& config() const { return config_; }
  int sellers() const { return config_.sellers; }

  // Greedy policy output in original seller order.
  Allocation act(const MarketState& state) const;

  void remember(Transition t) { buffer_.push(std::move(t)); }
  ReplayBuffer& buffer() { return buffer_; }
  const ReplayBuffer& buffer() const { return buffer_; }

  Minibatch sample(Rng& rng) const;
  Minibatch batch_of(std::span<const std::size_t> indices) const;
  // r + gamma * Q_target(s', mu_target(s')).
  Mat td_targets(const Minibatch& batch) const;
  double critic_loss(const Minibatch& batch) const;
  // One Adam step on the critic; returns the loss before the step.
  double critic_update(const Minibatch& batch);
  // One Adam step ascending mean Q(s, mu(s)) with the critic frozen.
  void actor_update(const Minibatch& batch);
  double mean_policy_q(const Minibatch& batch) const;
  // Q(s, a) for one original-order state/action pair.
  double q_value(const MarketState& state, const Allocation& q) const;
  void update_targets();
  // Sample, critic step, actor step, soft target update. Returns critic loss.
  double train_step(Rng& rng);

  nn::ParamSet& actor() { return actor_; }
  nn::ParamSet& critic() { return critic_; }
  const nn::ParamSet& actor() const { return actor_; }
  const nn::ParamSet& critic() const { return critic_; }
  const nn::ParamSet& actor_target() const { return actor_target_; }
  const nn::ParamSet& critic_target() const { return critic_target_; }
  nn::AdamState& actor_optimizer() { return actor_opt_; }
  nn::AdamState& critic_optimizer() { return critic_opt_; }

  void save(std::ostream& out, const std::string& prefix = "") const;
  void load(const nn::BlockMap& blocks, const std::string& prefix = "");

 protected:
  explicit ActorCriticAgent(const AgentConfig& config);
  // Call at the end of the subclass constructor once the networks exist.
  void finish_setup();
  void check_state(const MarketState& state) const;
  std::size_t state_width() const;

  // Rewrites each row of `states` (and `actions`, if given) into the
  // canonical seller order. `orders[b][k]` is the original index of the
  // seller placed at position k.
  virtual void canonicalize(Mat& states, Mat* actions,
                            std::vector<std::vector<int>>* orders) const;
  // B x m allocation in canonical order.
  virtual nn::Var actor_forward(nn::Tape& tape, std::span<const nn::Var> bound,
                                const Mat& states) const = 0;
  // B x 1 Q-values.
  virtual nn::Var critic_forward(nn::Tape& tape, std::span<const nn::Var> bound,
                                 const Mat& states, nn::Var actions) const = 0;

  AgentConfig config_;
  nn::ParamSet actor_;
  nn::ParamSet critic_;
  nn::ParamSet actor_target_;
  nn::ParamSet critic_target_;
  nn::AdamState actor_opt_;
  nn::AdamState critic_opt_;
  ReplayBuffer buffer_;
};

}  // namespace ia_arena::rl
