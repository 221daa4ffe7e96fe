#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ia_arena/market.hpp"
#include "ia_arena/random.hpp"

namespace ia_arena {

enum class StrategyKind { EpsGreedy, EpsFirst, Ucb1, Exp3, Fixed };

std::string_view to_string(StrategyKind kind);
StrategyKind parse_strategy_kind(std::string_view name);

struct StrategyParams {
  // Per-seller exploration rate ~ Normal(mean, stddev), clamped to [0, 1].
  double eps_greedy_mean = 0.1;
  double eps_greedy_stddev = 0.1 / 3.0;
  int eps_first_horizon = 200;
  double eps_first_epsilon = 0.1;
  double exp3_gamma = 0.1;
  // Swap the recurrence x/t + u/t and log2(t)/n bonus for the textbook
  // empirical mean and sqrt(2 ln t / n).
  bool ucb1_textbook = false;
};

// Empirical per-arm means, shared by both semi-uniform strategies.
struct ArmStatistics {
  std::vector<double> means;
  std::vector<long> counts;

  explicit ArmStatistics(int arms = 0) : means(arms, 0.0), counts(arms, 0) {}
  void observe(int arm, double payoff);
  // Untried arms count as mean 0; ties resolve to the lowest index.
  int best_arm() const;
};

struct EpsGreedyState {
  ArmStatistics stats;
  double epsilon;
};

struct EpsFirstState {
  ArmStatistics stats;
  int horizon;
  double epsilon;
};

struct Ucb1State {
  std::vector<double> values;
  std::vector<long> counts;
  bool textbook = false;
};

// Weights are kept in log space; only ratios enter the probabilities.
struct Exp3State {
  std::vector<double> log_weights;
  double gamma;

  static Exp3State uniform(int arms, double gamma);
  double weight(int arm) const;
};

// Single-arm seller pinned to one price.
struct FixedState {
  int arm;
};

using BanditState =
    std::variant<EpsGreedyState, EpsFirstState, Ucb1State, Exp3State, FixedState>;

struct PriceChoice {
  int arm;
  double price;
};

double scale_payoff(double payoff);

PriceChoice eps_greedy_choose(const EpsGreedyState& state, const PriceGrid& grid, Rng& rng);
PriceChoice eps_first_choose(const EpsFirstState& state, const PriceGrid& grid, long round,
                             Rng& rng);
std::vector<double> exp3_probabilities(const Exp3State& state);
PriceChoice exp3_choose(const Exp3State& state, const PriceGrid& grid, Rng& rng);
void exp3_update(Exp3State& state, int arm, double scaled_payoff);
PriceChoice ucb1_choose(const Ucb1State& state, const PriceGrid& grid, long round);
// `round` is 1-based: the first observation divides by 1.
void ucb1_update(Ucb1State& state, int arm, long round, double scaled_payoff);

BanditState make_bandit(StrategyKind kind, const PriceGrid& grid, const StrategyParams& params,
                        Rng& rng, int fixed_arm = 0);

// One pricing agent: owns its bandit memory and random stream, and sees
// nothing but its own payoffs.
class Seller {
 public:
  Seller(StrategyKind kind, double cost, const PriceGrid& grid, const StrategyParams& params,
         Rng rng, int fixed_arm = 0);

  StrategyKind kind() const { return kind_; }
  double cost() const { return cost_; }
  void set_cost(double cost);
  const BanditState& state() const { return state_; }

  // Rounds are 0-based within an episode.
  PriceChoice choose(long round);
  void observe(int arm, long round, double raw_payoff);
  // Fresh bandit memory; the exploration rate drawn at creation is kept.
  void reset();

 private:
  StrategyKind kind_;
  double cost_;
  PriceGrid grid_;
  StrategyParams params_;
  Rng rng_;
  BanditState initial_;
  BanditState state_;
};

}  // namespace ia_arena
