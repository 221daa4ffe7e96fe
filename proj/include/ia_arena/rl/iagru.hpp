#pragma once

#include <vector>

#include "ia_arena/nn/layers.hpp"
#include "ia_arena/rl/agent.hpp"

namespace ia_arena::rl {

struct SellerOrder {
  MarketState sorted;
  // order[k] is the original index of the seller at sorted position k.
  std::vector<int> order;
  // inverse[i] is the sorted position of original seller i.
  std::vector<int> inverse;
};

// Sorts sellers by descending mean revenue over the window; ties keep
// ascending original index.
SellerOrder permutation_transform(const MarketState& state);
std::vector<int> revenue_order(std::span<const double> flat_window, int window, int sellers);

// Permutation-equivariant allocator. A background GRU reads all sellers'
// records (in canonical order) into a public vector pv, a per-seller GRU
// reads each seller's own history into f_i, and one sub-actor shared by
// every seller scores (pv, f_i); the allocation is the softmax of the
// scores. The critic mirrors this with a shared sub-critic over
// (pv, f_i, q_i) whose outputs are summed.
class IaGruAgent final : public ActorCriticAgent {
 public:
  IaGruAgent(const AgentConfig& config, Rng& init_rng);

  std::string_view kind() const override { return "iagru"; }

  // Per-seller sub-critic values in original order; they sum to Q.
  std::vector<double> sub_critic_values(const MarketState& state, const Allocation& q) const;

 protected:
  void canonicalize(Mat& states, Mat* actions,
                    std::vector<std::vector<int>>* orders) const override;
  nn::Var actor_forward(nn::Tape& tape, std::span<const nn::Var> bound,
                        const Mat& states) const override;
  nn::Var critic_forward(nn::Tape& tape, std::span<const nn::Var> bound, const Mat& states,
                         nn::Var actions) const override;

 private:
  struct Tower {
    nn::Gru background;
    nn::Gru seller;
    nn::Dense hidden;
    nn::Dense out;
  };

  static Tower build(nn::ParamSet& params, const AgentConfig& config, bool with_action,
                     Rng& rng);
  // (B*m) x (pv + f) features, row b*m + i.
  nn::Var features(nn::Tape& tape, std::span<const nn::Var> bound, const Tower& tower,
                   const Mat& states) const;
  nn::Var sub_critics(nn::Tape& tape, std::span<const nn::Var> bound, const Mat& states,
                      nn::Var actions) const;

  Tower actor_tower_;
  Tower critic_tower_;
};

}  // namespace ia_arena::rl
