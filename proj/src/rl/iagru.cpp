#include "ia_arena/rl/iagru.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ia_arena::rl {

std::vector<int> revenue_order(std::span<const double> flat_window, int window, int sellers) {
  constexpr int kFields = SellerRecord::kFields;
  std::vector<double> key(sellers, 0.0);
  for (int t = 0; t < window; ++t) {
    for (int i = 0; i < sellers; ++i) key[i] += flat_window[(t * sellers + i) * kFields + 3];
  }
  for (double& k : key) k /= window;
  std::vector<int> order(sellers);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] > key[b]; });
  return order;
}

SellerOrder permutation_transform(const MarketState& state) {
  const int m = state.sellers();
  const int T = state.window();
  std::vector<int> order = revenue_order(state.flat(), T, m);
  std::vector<int> inverse(m);
  for (int k = 0; k < m; ++k) inverse[order[k]] = k;
  std::vector<double> sorted(state.flat().size());
  const auto src = state.flat();
  constexpr int kFields = SellerRecord::kFields;
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < m; ++k) {
      std::copy_n(src.begin() + (t * m + order[k]) * kFields, kFields,
                  sorted.begin() + (t * m + k) * kFields);
    }
  }
  return {MarketState::from_flat(T, m, state.round(), std::move(sorted)), std::move(order),
          std::move(inverse)};
}

IaGruAgent::Tower IaGruAgent::build(nn::ParamSet& params, const AgentConfig& config,
                                    bool with_action, Rng& rng) {
  const Eigen::Index m = config.sellers;
  Tower t;
  t.background = nn::Gru::create(params, "background", m * SellerRecord::kFields,
                                 config.background_hidden, rng);
  t.seller = nn::Gru::create(params, "seller", SellerRecord::kFields, config.seller_hidden, rng);
  const Eigen::Index in = config.background_hidden + config.seller_hidden + (with_action ? 1 : 0);
  t.hidden = nn::Dense::create(params, with_action ? "subcritic.fc" : "subactor.fc", in,
                               config.head_hidden, rng);
  t.out = nn::Dense::create(params, with_action ? "subcritic.q" : "subactor.score",
                            config.head_hidden, 1, rng);
  return t;
}

IaGruAgent::IaGruAgent(const AgentConfig& config, Rng& init_rng) : ActorCriticAgent(config) {
  actor_tower_ = build(actor_, config, false, init_rng);
  critic_tower_ = build(critic_, config, true, init_rng);
  finish_setup();
}

void IaGruAgent::canonicalize(Mat& states, Mat* actions,
                              std::vector<std::vector<int>>* orders) const {
  const int m = config_.sellers;
  const int T = config_.window;
  constexpr int kFields = SellerRecord::kFields;
  if (orders) orders->assign(states.rows(), {});
  Eigen::RowVectorXd row(states.cols());
  Eigen::RowVectorXd act(m);
  for (Eigen::Index b = 0; b < states.rows(); ++b) {
    row = states.row(b);
    std::vector<int> order =
        revenue_order(std::span<const double>(row.data(), row.size()), T, m);
    for (int t = 0; t < T; ++t) {
      for (int k = 0; k < m; ++k) {
        states.block(b, (t * m + k) * kFields, 1, kFields) =
            row.segment((t * m + order[k]) * kFields, kFields);
      }
    }
    if (actions) {
      act = actions->row(b);
      for (int k = 0; k < m; ++k) (*actions)(b, k) = act(order[k]);
    }
    if (orders) (*orders)[b] = std::move(order);
  }
}

nn::Var IaGruAgent::features(nn::Tape& tape, std::span<const nn::Var> bound, const Tower& tower,
                             const Mat& states) const {
  const Eigen::Index batch = states.rows();
  const Eigen::Index m = config_.sellers;
  const Eigen::Index per_round = m * SellerRecord::kFields;
  std::vector<nn::Var> all_sellers, each_seller;
  for (int t = 0; t < config_.window; ++t) {
    Mat round = states.middleCols(t * per_round, per_round);
    if (config_.share_scaling) {
      // impressions, transactions and revenue shrink like 1/m; read them
      // relative to a uniform split. Price is left alone.
      for (Eigen::Index k = 0; k < per_round; ++k) {
        if (k % SellerRecord::kFields != 1) round.col(k) *= static_cast<double>(m);
      }
    }
    each_seller.push_back(
        tape.constant(Eigen::Map<const Mat>(round.data(), batch * m, SellerRecord::kFields)));
    all_sellers.push_back(tape.constant(std::move(round)));
  }
  nn::Var pv = nn::gru_forward_from_zero(bound, tower.background, all_sellers);
  nn::Var f = nn::gru_forward_from_zero(bound, tower.seller, each_seller);
  const nn::Var parts[] = {nn::repeat_rows(pv, m), f};
  return nn::concat_cols(parts);
}

nn::Var IaGruAgent::actor_forward(nn::Tape& tape, std::span<const nn::Var> bound,
                                  const Mat& states) const {
  nn::Var x = features(tape, bound, actor_tower_, states);
  x = nn::dense_forward(bound, actor_tower_.hidden, x, true);
  x = nn::dense_forward(bound, actor_tower_.out, x, false);
  return nn::softmax_rows(nn::reshape(x, states.rows(), config_.sellers));
}

nn::Var IaGruAgent::sub_critics(nn::Tape& tape, std::span<const nn::Var> bound,
                                const Mat& states, nn::Var actions) const {
  const Eigen::Index batch = states.rows();
  const Eigen::Index m = config_.sellers;
  nn::Var q = nn::reshape(actions, batch * m, 1);
  if (config_.share_scaling) q = nn::affine(q, static_cast<double>(m), 0.0);
  const nn::Var parts[] = {features(tape, bound, critic_tower_, states), q};
  nn::Var x = nn::concat_cols(parts);
  x = nn::dense_forward(bound, critic_tower_.hidden, x, true);
  x = nn::dense_forward(bound, critic_tower_.out, x, false);
  return nn::reshape(x, batch, m);
}

nn::Var IaGruAgent::critic_forward(nn::Tape& tape, std::span<const nn::Var> bound,
                                   const Mat& states, nn::Var actions) const {
  return nn::sum_rows(sub_critics(tape, bound, states, actions));
}

std::vector<double> IaGruAgent::sub_critic_values(const MarketState& state,
                                                  const Allocation& q) const {
  check_state(state);
  const int m = config_.sellers;
  if (q.size() != static_cast<std::size_t>(m)) throw std::invalid_argument("allocation size mismatch");
  const auto flat = state.flat();
  Mat s = Eigen::Map<const Mat>(flat.data(), 1, static_cast<Eigen::Index>(flat.size()));
  Mat a = Eigen::Map<const Mat>(q.values().data(), 1, m);
  std::vector<std::vector<int>> orders;
  canonicalize(s, &a, &orders);
  nn::Tape tape;
  auto bound = critic_.bind_frozen(tape);
  const Mat values = sub_critics(tape, bound, s, tape.constant(a)).value();
  std::vector<double> out(m);
  for (int k = 0; k < m; ++k) out[orders[0][k]] = values(0, k);
  return out;
}

}  // namespace ia_arena::rl
