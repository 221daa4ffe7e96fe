#include "ia_arena/rl/agent.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ia_arena::rl {

double NoiseSchedule::mean(int episode) const {
  return initial_mean * std::pow(decay, static_cast<double>(std::max(episode, 0)));
}

Allocation explore(const Allocation& q, int episode, const NoiseSchedule& noise, Rng& rng) {
  std::normal_distribution<double> eta(noise.mean(episode), noise.stddev);
  std::vector<double> out(q.size());
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    out[i] = std::max(0.0, q[i] + eta(rng));
    total += out[i];
  }
  if (!(total > 0.0)) return Allocation::uniform(q.size());
  for (double& x : out) x /= total;
  return Allocation(std::move(out));
}

ActorCriticAgent::ActorCriticAgent(const AgentConfig& config)
    : config_(config), buffer_(config.buffer_capacity) {
  if (config.sellers < 1 || config.window < 1 || config.batch_size < 1) {
    throw std::invalid_argument("agent needs sellers, window and batch size >= 1");
  }
  if (!(config.gamma >= 0.0 && config.gamma < 1.0)) {
    throw std::invalid_argument("discount must lie in [0, 1)");
  }
}

void ActorCriticAgent::finish_setup() {
  actor_target_ = actor_;
  critic_target_ = critic_;
  actor_opt_ = nn::AdamState(actor_, {config_.actor_lr});
  critic_opt_ = nn::AdamState(critic_, {config_.critic_lr});
}

std::size_t ActorCriticAgent::state_width() const {
  return static_cast<std::size_t>(config_.window) * config_.sellers * SellerRecord::kFields;
}

void ActorCriticAgent::check_state(const MarketState& state) const {
  if (state.sellers() != config_.sellers || state.window() != config_.window) {
    throw std::invalid_argument(std::string(kind()) + " agent built for " +
                                std::to_string(config_.sellers) + " sellers, got " +
                                std::to_string(state.sellers()));
  }
}

void ActorCriticAgent::canonicalize(Mat&, Mat*, std::vector<std::vector<int>>* orders) const {
  if (orders) orders->clear();
}

Allocation ActorCriticAgent::act(const MarketState& state) const {
  check_state(state);
  const auto flat = state.flat();
  Mat s = Eigen::Map<const Mat>(flat.data(), 1, static_cast<Eigen::Index>(flat.size()));
  std::vector<std::vector<int>> orders;
  canonicalize(s, nullptr, &orders);
  nn::Tape tape;
  auto bound = actor_.bind_frozen(tape);
  const Mat y = actor_forward(tape, bound, s).value();
  std::vector<double> q(config_.sellers);
  for (int k = 0; k < config_.sellers; ++k) {
    const int original = orders.empty() ? k : orders[0][k];
    q[original] = y(0, k);
  }
  return Allocation(std::move(q));
}

Minibatch ActorCriticAgent::batch_of(std::span<const std::size_t> indices) const {
  const auto b = static_cast<Eigen::Index>(indices.size());
  const auto width = static_cast<Eigen::Index>(state_width());
  Minibatch mb{Mat(b, width), Mat(b, config_.sellers), Mat(b, 1), Mat(b, width)};
  for (Eigen::Index r = 0; r < b; ++r) {
    const Transition& t = buffer_.at(indices[r]);
    mb.states.row(r) = Eigen::Map<const Eigen::RowVectorXd>(t.state.data(), width);
    mb.actions.row(r) = Eigen::Map<const Eigen::RowVectorXd>(t.action.data(), config_.sellers);
    mb.rewards(r, 0) = t.reward;
    mb.next_states.row(r) = Eigen::Map<const Eigen::RowVectorXd>(t.next_state.data(), width);
  }
  return mb;
}

Minibatch ActorCriticAgent::sample(Rng& rng) const {
  if (buffer_.size() < static_cast<std::size_t>(config_.batch_size)) {
    throw std::logic_error("replay buffer holds fewer transitions than one minibatch");
  }
  const auto idx = buffer_.sample_indices(config_.batch_size, rng);
  return batch_of(idx);
}

Mat ActorCriticAgent::td_targets(const Minibatch& batch) const {
  Mat next = batch.next_states;
  canonicalize(next, nullptr, nullptr);
  nn::Tape tape;
  auto actor_bound = actor_target_.bind_frozen(tape);
  auto critic_bound = critic_target_.bind_frozen(tape);
  nn::Var mu = actor_forward(tape, actor_bound, next);
  nn::Var q = critic_forward(tape, critic_bound, next, mu);
  return batch.rewards + config_.gamma * q.value();
}

double ActorCriticAgent::critic_loss(const Minibatch& batch) const {
  const Mat y = td_targets(batch);
  Mat s = batch.states;
  Mat a = batch.actions;
  canonicalize(s, &a, nullptr);
  nn::Tape tape;
  auto bound = critic_.bind_frozen(tape);
  nn::Var q = critic_forward(tape, bound, s, tape.constant(a));
  return (q.value() - y).array().square().mean();
}

double ActorCriticAgent::critic_update(const Minibatch& batch) {
  const Mat y = td_targets(batch);
  Mat s = batch.states;
  Mat a = batch.actions;
  canonicalize(s, &a, nullptr);
  critic_.zero_grad();
  nn::Tape tape;
  auto bound = critic_.bind(tape, true);
  nn::Var q = critic_forward(tape, bound, s, tape.constant(a));
  nn::Var loss = nn::mean(nn::square(nn::sub(q, tape.constant(y))));
  tape.backward(loss);
  nn::adam_step(critic_, critic_opt_);
  return loss.value()(0, 0);
}

void ActorCriticAgent::actor_update(const Minibatch& batch) {
  Mat s = batch.states;
  canonicalize(s, nullptr, nullptr);
  actor_.zero_grad();
  nn::Tape tape;
  auto actor_bound = actor_.bind(tape, true);
  auto critic_bound = critic_.bind(tape, false);
  nn::Var mu = actor_forward(tape, actor_bound, s);
  nn::Var q = critic_forward(tape, critic_bound, s, mu);
  tape.backward(nn::affine(nn::mean(q), -1.0, 0.0));
  nn::adam_step(actor_, actor_opt_);
}

double ActorCriticAgent::mean_policy_q(const Minibatch& batch) const {
  Mat s = batch.states;
  canonicalize(s, nullptr, nullptr);
  nn::Tape tape;
  auto actor_bound = actor_.bind_frozen(tape);
  auto critic_bound = critic_.bind_frozen(tape);
  nn::Var mu = actor_forward(tape, actor_bound, s);
  return critic_forward(tape, critic_bound, s, mu).value().mean();
}

double ActorCriticAgent::q_value(const MarketState& state, const Allocation& q) const {
  check_state(state);
  if (q.size() != static_cast<std::size_t>(config_.sellers)) {
    throw std::invalid_argument("allocation size does not match agent");
  }
  const auto flat = state.flat();
  Mat s = Eigen::Map<const Mat>(flat.data(), 1, static_cast<Eigen::Index>(flat.size()));
  Mat a = Eigen::Map<const Mat>(q.values().data(), 1, config_.sellers);
  canonicalize(s, &a, nullptr);
  nn::Tape tape;
  auto bound = critic_.bind_frozen(tape);
  return critic_forward(tape, bound, s, tape.constant(a)).value()(0, 0);
}

void ActorCriticAgent::update_targets() {
  nn::soft_update(actor_target_, actor_, config_.tau);
  nn::soft_update(critic_target_, critic_, config_.tau);
}

double ActorCriticAgent::train_step(Rng& rng) {
  const Minibatch batch = sample(rng);
  const double loss = critic_update(batch);
  actor_update(batch);
  update_targets();
  return loss;
}

void ActorCriticAgent::save(std::ostream& out, const std::string& prefix) const {
  out << "# agent " << kind() << " sellers " << config_.sellers << " window " << config_.window
      << '\n';
  nn::write_params(out, actor_, prefix + "actor/");
  nn::write_params(out, critic_, prefix + "critic/");
  nn::write_params(out, actor_target_, prefix + "actor_target/");
  nn::write_params(out, critic_target_, prefix + "critic_target/");
}

void ActorCriticAgent::load(const nn::BlockMap& blocks, const std::string& prefix) {
  nn::load_params(actor_, blocks, prefix + "actor/");
  nn::load_params(critic_, blocks, prefix + "critic/");
  nn::load_params(actor_target_, blocks, prefix + "actor_target/");
  nn::load_params(critic_target_, blocks, prefix + "critic_target/");
}

}  // namespace ia_arena::rl
