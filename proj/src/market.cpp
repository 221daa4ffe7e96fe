#include "ia_arena/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ia_arena {
namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

void require_unit(double x, const char* what) {
  if (!in_unit(x)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1], got " +
                                std::to_string(x));
  }
}

}  // namespace

bool is_valid(const SellerRecord& r) {
  return in_unit(r.impressions) && in_unit(r.price) && in_unit(r.transactions) &&
         in_unit(r.revenue) && r.transactions <= r.impressions + 1e-15 &&
         std::abs(r.revenue - r.price * r.transactions) <= 1e-12;
}

PriceGrid::PriceGrid(int resolution) : resolution_(resolution) {
  if (resolution < 1) throw std::invalid_argument("price grid resolution must be >= 1");
}

double PriceGrid::price(int arm) const {
  if (arm < 0 || arm > resolution_) throw std::out_of_range("price arm outside grid");
  return static_cast<double>(arm) / resolution_;
}

bool PriceGrid::on_grid(double p) const {
  if (!in_unit(p)) return false;
  double scaled = p * resolution_;
  return std::abs(scaled - std::round(scaled)) < 1e-9;
}

Allocation::Allocation(std::vector<double> shares) : shares_(std::move(shares)) {
  if (shares_.empty()) throw std::invalid_argument("allocation over zero sellers");
  double total = 0.0;
  for (double q : shares_) {
    if (!(q >= 0.0) || !std::isfinite(q)) {
      throw std::invalid_argument("allocation entries must be finite and nonnegative");
    }
    total += q;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw std::invalid_argument("allocation must sum to 1, got " + std::to_string(total));
  }
}

Allocation Allocation::uniform(std::size_t m) {
  return Allocation(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

Allocation Allocation::point(std::size_t m, std::size_t winner) {
  std::vector<double> q(m, 0.0);
  q.at(winner) = 1.0;
  return Allocation(std::move(q));
}

MarketState::MarketState(int window, int sellers)
    : window_(window), sellers_(sellers) {
  if (window < 1 || sellers < 1) {
    throw std::invalid_argument("market state needs window >= 1 and sellers >= 1");
  }
  data_.assign(static_cast<std::size_t>(window) * sellers * SellerRecord::kFields, 0.0);
}

SellerRecord MarketState::record(int t, int seller) const {
  if (t < 0 || t >= window_ || seller < 0 || seller >= sellers_) {
    throw std::out_of_range("record index outside window");
  }
  const double* r = &data_[(static_cast<std::size_t>(t) * sellers_ + seller) *
                           SellerRecord::kFields];
  return {r[0], r[1], r[2], r[3]};
}

MarketState MarketState::advanced(std::span<const SellerRecord> round_records) const {
  if (round_records.size() != static_cast<std::size_t>(sellers_)) {
    throw std::invalid_argument("round has wrong number of sellers");
  }
  MarketState next = *this;
  const std::size_t stride = static_cast<std::size_t>(sellers_) * SellerRecord::kFields;
  std::copy(data_.begin() + stride, data_.end(), next.data_.begin());
  double* last = next.data_.data() + (window_ - 1) * stride;
  for (const SellerRecord& r : round_records) {
    *last++ = r.impressions;
    *last++ = r.price;
    *last++ = r.transactions;
    *last++ = r.revenue;
  }
  next.round_ = round_ + 1;
  return next;
}

MarketState MarketState::from_flat(int window, int sellers, long round,
                                   std::vector<double> data) {
  MarketState s(window, sellers);
  if (data.size() != s.data_.size()) throw std::invalid_argument("flat state has wrong size");
  s.data_ = std::move(data);
  s.round_ = round;
  return s;
}

double purchase_probability(double price, double impressions) {
  require_unit(price, "price");
  require_unit(impressions, "impressions");
  return (1.0 - price) * impressions;
}

double seller_payoff(double price, double impressions, double cost) {
  require_unit(cost, "cost");
  return purchase_probability(price, impressions) * (price - cost);
}

StepResult market_step(const MarketState& state, std::span<const double> prices,
                       const Allocation& q, std::span<const double> costs,
                       double impression_share) {
  const auto m = static_cast<std::size_t>(state.sellers());
  if (prices.size() != m || q.size() != m || costs.size() != m) {
    throw std::invalid_argument("market_step: prices, allocation, costs and state disagree on m");
  }
  if (!(impression_share > 0.0) || impression_share > 1.0) {
    throw std::invalid_argument("impression share must lie in (0, 1]");
  }
  std::vector<SellerRecord> records(m);
  std::vector<double> payoffs(m);
  double reward = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double v = impression_share * q[i];
    const double n = purchase_probability(prices[i], std::min(v, 1.0));
    records[i] = {v, prices[i], n, prices[i] * n};
    payoffs[i] = seller_payoff(prices[i], std::min(v, 1.0), costs[i]);
    reward += records[i].revenue;
  }
  MarketState next = state.advanced(records);
  return {std::move(next), reward, std::move(payoffs), std::move(records)};
}

double clamp_cost(double raw) { return std::clamp(raw, 0.0, 1.0); }

std::vector<double> sample_costs(std::size_t m, Rng& rng) {
  std::normal_distribution<double> dist(0.5, std::sqrt(0.5));
  std::vector<double> costs(m);
  for (double& c : costs) c = clamp_cost(dist(rng));
  return costs;
}

}  // namespace ia_arena
