#include "ia_arena/baselines.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace ia_arena {

Allocation greedy_myopic(const MarketState& state) {
  const int m = state.sellers();
  std::vector<double> revenue(m);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    revenue[i] = state.latest(i).revenue;
    total += revenue[i];
  }
  if (state.round() == 0 || !(total > 0.0)) return Allocation::uniform(m);
  for (double& r : revenue) r /= total;
  return Allocation(std::move(revenue));
}

LinUcbState::LinUcbState(int sellers, double alpha_in)
    : design(sellers, Eigen::Matrix4d::Identity()),
      response(sellers, Features::Zero()),
      alpha(alpha_in) {
  if (sellers < 1) throw std::invalid_argument("linucb needs at least one arm");
  if (alpha_in < 0.0) throw std::invalid_argument("linucb alpha must be nonnegative");
}

Features record_features(const SellerRecord& r) {
  return Features(r.impressions, r.price, r.transactions, r.revenue);
}

std::vector<Features> latest_features(const MarketState& state) {
  std::vector<Features> out;
  out.reserve(state.sellers());
  for (int i = 0; i < state.sellers(); ++i) out.push_back(record_features(state.latest(i)));
  return out;
}

LinUcbChoice linucb_choose(const LinUcbState& state, std::span<const Features> features) {
  const int m = state.sellers();
  if (features.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("linucb: one feature vector per arm required");
  }
  std::vector<double> scores(m);
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    Eigen::LLT<Eigen::Matrix4d> llt(state.design[i]);
    if (llt.info() != Eigen::Success) throw std::logic_error("linucb design matrix lost definiteness");
    const Features theta = llt.solve(state.response[i]);
    const Features& x = features[i];
    const double width = x.dot(llt.solve(x));
    scores[i] = theta.dot(x) + state.alpha * std::sqrt(std::max(width, 0.0));
    if (scores[i] > best_score) {
      best_score = scores[i];
      best = i;
    }
  }
  return {best, Allocation::point(m, best), std::move(scores)};
}

void linucb_update(LinUcbState& state, int arm, const Features& x, double reward) {
  if (arm < 0 || arm >= state.sellers()) throw std::out_of_range("linucb arm out of range");
  if (!(reward >= 0.0 && reward <= 1.0)) throw std::invalid_argument("linucb reward must lie in [0, 1]");
  state.design[arm] += x * x.transpose();
  state.response[arm] += reward * x;
}

}  // namespace ia_arena
