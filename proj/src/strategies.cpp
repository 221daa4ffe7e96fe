#include "ia_arena/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ia_arena {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int uniform_arm(int arms, Rng& rng) {
  return std::uniform_int_distribution<int>(0, arms - 1)(rng);
}

}  // namespace

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::EpsGreedy: return "eps_greedy";
    case StrategyKind::EpsFirst: return "eps_first";
    case StrategyKind::Ucb1: return "ucb1";
    case StrategyKind::Exp3: return "exp3";
    case StrategyKind::Fixed: return "fixed";
  }
  return "unknown";
}

StrategyKind parse_strategy_kind(std::string_view name) {
  for (auto k : {StrategyKind::EpsGreedy, StrategyKind::EpsFirst, StrategyKind::Ucb1,
                 StrategyKind::Exp3, StrategyKind::Fixed}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown strategy kind '" + std::string(name) + "'");
}

void ArmStatistics::observe(int arm, double payoff) {
  auto j = static_cast<std::size_t>(arm);
  counts.at(j) += 1;
  means[j] += (payoff - means[j]) / static_cast<double>(counts[j]);
}

int ArmStatistics::best_arm() const {
  // max_element keeps the first maximum.
  return static_cast<int>(std::max_element(means.begin(), means.end()) - means.begin());
}

Exp3State Exp3State::uniform(int arms, double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0) throw std::invalid_argument("exp3 gamma must lie in (0, 1]");
  return {std::vector<double>(arms, 0.0), gamma};
}

double Exp3State::weight(int arm) const { return std::exp(log_weights.at(arm)); }

double scale_payoff(double payoff) {
  if (!(payoff >= -1.0 && payoff <= 1.0)) {
    throw std::invalid_argument("payoff must lie in [-1, 1], got " + std::to_string(payoff));
  }
  return (payoff + 1.0) / 2.0;
}

PriceChoice eps_greedy_choose(const EpsGreedyState& state, const PriceGrid& grid, Rng& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  int arm = coin(rng) < state.epsilon ? uniform_arm(grid.arms(), rng) : state.stats.best_arm();
  return {arm, grid.price(arm)};
}

PriceChoice eps_first_choose(const EpsFirstState& state, const PriceGrid& grid, long round,
                             Rng& rng) {
  const double exploration_rounds = state.epsilon * state.horizon;
  int arm = static_cast<double>(round) < exploration_rounds ? uniform_arm(grid.arms(), rng)
                                                            : state.stats.best_arm();
  return {arm, grid.price(arm)};
}

std::vector<double> exp3_probabilities(const Exp3State& state) {
  const auto arms = state.log_weights.size();
  const double top = *std::max_element(state.log_weights.begin(), state.log_weights.end());
  std::vector<double> probs(arms);
  double total = 0.0;
  for (std::size_t j = 0; j < arms; ++j) {
    probs[j] = std::exp(state.log_weights[j] - top);
    total += probs[j];
  }
  const double floor = state.gamma / static_cast<double>(arms);
  for (double& p : probs) p = (1.0 - state.gamma) * p / total + floor;
  return probs;
}

PriceChoice exp3_choose(const Exp3State& state, const PriceGrid& grid, Rng& rng) {
  const auto probs = exp3_probabilities(state);
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  int arm = static_cast<int>(probs.size()) - 1;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (u < probs[j]) {
      arm = static_cast<int>(j);
      break;
    }
    u -= probs[j];
  }
  return {arm, grid.price(arm)};
}

void exp3_update(Exp3State& state, int arm, double scaled_payoff) {
  if (!(scaled_payoff >= 0.0 && scaled_payoff <= 1.0)) {
    throw std::invalid_argument("exp3 payoff must be scaled into [0, 1]");
  }
  const auto probs = exp3_probabilities(state);
  const double arms = static_cast<double>(probs.size());
  const double estimate = scaled_payoff / probs.at(arm);
  state.log_weights[arm] += state.gamma * estimate / arms;
}

PriceChoice ucb1_choose(const Ucb1State& state, const PriceGrid& grid, long round) {
  const int arms = static_cast<int>(state.values.size());
  // Every arm is played once before any index comparison.
  auto untried = std::find(state.counts.begin(), state.counts.end(), 0);
  if (untried != state.counts.end()) {
    int arm = static_cast<int>(untried - state.counts.begin());
    return {arm, grid.price(arm)};
  }
  long total = 0;
  for (long c : state.counts) total += c;
  int best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < arms; ++j) {
    const double n = static_cast<double>(state.counts[j]);
    const double bonus = state.textbook
                             ? std::sqrt(2.0 * std::log(static_cast<double>(total)) / n)
                             : std::log2(static_cast<double>(round)) / n;
    const double index = state.values[j] + bonus;
    if (index > best_index) {
      best_index = index;
      best = j;
    }
  }
  return {best, grid.price(best)};
}

void ucb1_update(Ucb1State& state, int arm, long round, double scaled_payoff) {
  if (round < 1) throw std::invalid_argument("ucb1_update needs a 1-based round");
  auto j = static_cast<std::size_t>(arm);
  state.counts.at(j) += 1;
  if (state.textbook) {
    state.values[j] += (scaled_payoff - state.values[j]) / static_cast<double>(state.counts[j]);
  } else {
    const double t = static_cast<double>(round);
    state.values[j] = state.values[j] / t + scaled_payoff / t;
  }
}

BanditState make_bandit(StrategyKind kind, const PriceGrid& grid, const StrategyParams& params,
                        Rng& rng, int fixed_arm) {
  const int arms = grid.arms();
  switch (kind) {
    case StrategyKind::EpsGreedy: {
      std::normal_distribution<double> draw(params.eps_greedy_mean, params.eps_greedy_stddev);
      return EpsGreedyState{ArmStatistics(arms), std::clamp(draw(rng), 0.0, 1.0)};
    }
    case StrategyKind::EpsFirst:
      return EpsFirstState{ArmStatistics(arms), params.eps_first_horizon,
                           params.eps_first_epsilon};
    case StrategyKind::Ucb1:
      return Ucb1State{std::vector<double>(arms, 0.0), std::vector<long>(arms, 0),
                       params.ucb1_textbook};
    case StrategyKind::Exp3:
      return Exp3State::uniform(arms, params.exp3_gamma);
    case StrategyKind::Fixed:
      if (fixed_arm < 0 || fixed_arm >= arms) throw std::out_of_range("fixed arm outside grid");
      return FixedState{fixed_arm};
  }
  throw std::invalid_argument("unhandled strategy kind");
}

Seller::Seller(StrategyKind kind, double cost, const PriceGrid& grid,
               const StrategyParams& params, Rng rng, int fixed_arm)
    : kind_(kind),
      cost_(cost),
      grid_(grid),
      params_(params),
      rng_(std::move(rng)),
      initial_(make_bandit(kind, grid, params, rng_, fixed_arm)),
      state_(initial_) {
  set_cost(cost);
}

void Seller::set_cost(double cost) {
  if (!(cost >= 0.0 && cost <= 1.0)) throw std::invalid_argument("seller cost must lie in [0, 1]");
  cost_ = cost;
}

PriceChoice Seller::choose(long round) {
  return std::visit(
      Overloaded{
          [&](const EpsGreedyState& s) { return eps_greedy_choose(s, grid_, rng_); },
          [&](const EpsFirstState& s) { return eps_first_choose(s, grid_, round, rng_); },
          [&](const Ucb1State& s) { return ucb1_choose(s, grid_, round); },
          [&](const Exp3State& s) { return exp3_choose(s, grid_, rng_); },
          [&](const FixedState& s) { return PriceChoice{s.arm, grid_.price(s.arm)}; },
      },
      state_);
}

void Seller::observe(int arm, long round, double raw_payoff) {
  const double u = scale_payoff(raw_payoff);
  std::visit(Overloaded{
                 [&](EpsGreedyState& s) { s.stats.observe(arm, u); },
                 [&](EpsFirstState& s) { s.stats.observe(arm, u); },
                 [&](Ucb1State& s) { ucb1_update(s, arm, round + 1, u); },
                 [&](Exp3State& s) { exp3_update(s, arm, u); },
                 [](FixedState&) {},
             },
             state_);
}

void Seller::reset() { state_ = initial_; }

}  // namespace ia_arena
