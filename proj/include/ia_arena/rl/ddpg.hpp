#pragma once

#include "ia_arena/nn/layers.hpp"
#include "ia_arena/rl/agent.hpp"

namespace ia_arena::rl {

// Fully connected baseline. The actor sees the flattened window in seller
// position order, so its output is tied to positions rather than records.
class DdpgAgent final : public ActorCriticAgent {
 public:
  DdpgAgent(const AgentConfig& config, Rng& init_rng);

  std::string_view kind() const override { return "ddpg"; }

 protected:
  nn::Var actor_forward(nn::Tape& tape, std::span<const nn::Var> bound,
                        const Mat& states) const override;
  nn::Var critic_forward(nn::Tape& tape, std::span<const nn::Var> bound, const Mat& states,
                         nn::Var actions) const override;

 private:
  Mat inputs(const Mat& states) const;

  nn::Dense actor_in_, actor_hidden_, actor_out_;
  nn::Dense critic_in_, critic_hidden_, critic_out_;
};

}  // namespace ia_arena::rl
