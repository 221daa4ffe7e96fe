#include "ia_arena/rl/ddpg.hpp"

namespace ia_arena::rl {

Mat DdpgAgent::inputs(const Mat& states) const {
  if (!config_.share_scaling) return states;
  Mat x = states;
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    if (k % SellerRecord::kFields != 1) x.col(k) *= static_cast<double>(config_.sellers);
  }
  return x;
}

DdpgAgent::DdpgAgent(const AgentConfig& config, Rng& init_rng) : ActorCriticAgent(config) {
  const auto width = static_cast<Eigen::Index>(state_width());
  const int h = config.ddpg_hidden;
  actor_in_ = nn::Dense::create(actor_, "fc1", width, h, init_rng);
  actor_hidden_ = nn::Dense::create(actor_, "fc2", h, h, init_rng);
  actor_out_ = nn::Dense::create(actor_, "logits", h, config.sellers, init_rng);
  critic_in_ = nn::Dense::create(critic_, "fc1", width + config.sellers, h, init_rng);
  critic_hidden_ = nn::Dense::create(critic_, "fc2", h, h, init_rng);
  critic_out_ = nn::Dense::create(critic_, "q", h, 1, init_rng);
  finish_setup();
}

nn::Var DdpgAgent::actor_forward(nn::Tape& tape, std::span<const nn::Var> bound,
                                 const Mat& states) const {
  nn::Var x = tape.constant(inputs(states));
  x = nn::dense_forward(bound, actor_in_, x, true);
  x = nn::dense_forward(bound, actor_hidden_, x, true);
  return nn::softmax_rows(nn::dense_forward(bound, actor_out_, x, false));
}

nn::Var DdpgAgent::critic_forward(nn::Tape& tape, std::span<const nn::Var> bound,
                                  const Mat& states, nn::Var actions) const {
  const nn::Var a = config_.share_scaling
                        ? nn::affine(actions, static_cast<double>(config_.sellers), 0.0)
                        : actions;
  const nn::Var parts[] = {tape.constant(inputs(states)), a};
  nn::Var x = nn::concat_cols(parts);
  x = nn::dense_forward(bound, critic_in_, x, true);
  x = nn::dense_forward(bound, critic_hidden_, x, true);
  return nn::dense_forward(bound, critic_out_, x, false);
}

}  // namespace ia_arena::rl
