#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "ia_arena/market.hpp"

namespace ia_arena {

// Allocates proportionally to last-round revenue; uniform at round 0 or
// whenever the last round produced no revenue at all.
Allocation greedy_myopic(const MarketState& state);

using Features = Eigen::Matrix<double, 4, 1>;

// Disjoint linear UCB with one ridge model per seller.
struct LinUcbState {
  std::vector<Eigen::Matrix4d> design;    // A_i, starts at identity
  std::vector<Features> response;         // b_i, starts at zero
  double alpha = 1.0;

  LinUcbState(int sellers, double alpha);
  int sellers() const { return static_cast<int>(design.size()); }
};

struct LinUcbChoice {
  int arm;
  Allocation allocation;
  std::vector<double> scores;
};

Features record_features(const SellerRecord& r);
// Features of every seller from the most recent round of the window.
std::vector<Features> latest_features(const MarketState& state);

// The whole unit goes to the highest-scoring seller (ties to the lowest index).
LinUcbChoice linucb_choose(const LinUcbState& state, std::span<const Features> features);
void linucb_update(LinUcbState& state, int arm, const Features& x, double reward);

}  // namespace ia_arena
