#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ia_arena/random.hpp"

namespace ia_arena {

// One seller's outcome for one round: impression share v, price p,
// expected transactions n = (1 - p) v and expected revenue l = p n.
struct SellerRecord {
  double impressions = 0.0;
  double price = 0.0;
  double transactions = 0.0;
  double revenue = 0.0;

  static constexpr int kFields = 4;
};

bool is_valid(const SellerRecord& r);

// Uniform price grid {0, 1/K, ..., 1}.
class PriceGrid {
 public:
  explicit PriceGrid(int resolution = 100);

  int resolution() const { return resolution_; }
  int arms() const { return resolution_ + 1; }
  double price(int arm) const;
  bool on_grid(double p) const;

 private:
  int resolution_;
};

// A feasible impression allocation: nonnegative entries summing to one.
class Allocation {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit Allocation(std::vector<double> shares);
  static Allocation uniform(std::size_t m);
  // Puts the whole unit on one seller.
  static Allocation point(std::size_t m, std::size_t winner);

  std::size_t size() const { return shares_.size(); }
  double operator[](std::size_t i) const { return shares_[i]; }
  std::span<const double> values() const { return shares_; }

 private:
  std::vector<double> shares_;
};

// The last T rounds of records for m sellers, laid out row-major as
// (round, seller, field). Round 0 starts from an all-zero window.
class MarketState {
 public:
  MarketState(int window, int sellers);

  int window() const { return window_; }
  int sellers() const { return sellers_; }
  // Number of rounds played so far.
  long round() const { return round_; }

  // Oldest round is index 0, most recent is window() - 1.
  SellerRecord record(int t, int seller) const;
  SellerRecord latest(int seller) const { return record(window_ - 1, seller); }
  std::span<const double> flat() const { return data_; }

  // Appends one round and drops the oldest so the window stays at T.
  MarketState advanced(std::span<const SellerRecord> round_records) const;

  static MarketState from_flat(int window, int sellers, long round,
                               std::vector<double> data);

 private:
  int window_;
  int sellers_;
  long round_ = 0;
  std::vector<double> data_;
};

double purchase_probability(double price, double impressions);
double seller_payoff(double price, double impressions, double cost);

struct StepResult {
  MarketState next;
  double reward;
  std::vector<double> payoffs;
  std::vector<SellerRecord> records;
};

// Expected-value market transition. `impression_share` is the fraction of
// the global impression unit this market controls (1 unless the sellers are
// one partition of a larger market).
StepResult market_step(const MarketState& state, std::span<const double> prices,
                       const Allocation& q, std::span<const double> costs,
                       double impression_share = 1.0);

double clamp_cost(double raw);
// Normal(mean 1/2, variance 1/2), clamped into [0, 1].
std::vector<double> sample_costs(std::size_t m, Rng& rng);

}  // namespace ia_arena
