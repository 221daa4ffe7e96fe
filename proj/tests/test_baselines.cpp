#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "ia_arena/baselines.hpp"
#include "ia_arena/random.hpp"

using namespace ia_arena;

namespace {

// One round at given revenues: price 0.5 and v chosen so that l = 0.25 v.
MarketState with_revenues(const std::vector<double>& revenue) {
  const int m = static_cast<int>(revenue.size());
  std::vector<double> flat;
  for (double l : revenue) {
    const double v = 4.0 * l;
    flat.insert(flat.end(), {v, 0.5, 0.5 * v, l});
  }
  return MarketState::from_flat(1, m, 1, flat);
}

Features scaled(const Features& dir, double norm) { return dir.normalized() * norm; }

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("greedy myopic examples") {
  auto round0 = greedy_myopic(MarketState(1, 4));
  for (std::size_t i = 0; i < 4; ++i) CHECK(round0[i] == 0.25);

  auto q = greedy_myopic(with_revenues({0.01, 0.01, 0.02, 0.0}));
  const std::vector<double> expected{0.25, 0.25, 0.5, 0.0};
  for (std::size_t i = 0; i < 4; ++i) CHECK(q[i] == doctest::Approx(expected[i]).epsilon(1e-15));

  auto dead = greedy_myopic(with_revenues({0.0, 0.0, 0.0}));
  for (std::size_t i = 0; i < 3; ++i) CHECK(dead[i] == doctest::Approx(1.0 / 3));
}

TEST_CASE("property: greedy myopic is feasible and scale invariant") {
  Rng rng = make_stream(21, "greedy");
  std::uniform_real_distribution<double> rev(0.0, 0.05), lambda(0.1, 4.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t m = 1 + trial % 12;
    std::vector<double> r(m), r2(m);
    const double k = lambda(rng);
    for (std::size_t i = 0; i < m; ++i) {
      r[i] = rev(rng);
      r2[i] = k * r[i];
      if (r2[i] > 0.25) r2[i] = r[i] = 0.0;
    }
    auto a = greedy_myopic(with_revenues(r));
    auto b = greedy_myopic(with_revenues(r2));
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(a[i] >= 0.0);
      CHECK(std::abs(a[i] - b[i]) < 1e-12);
      total += a[i];
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("linucb choice at initialisation scores by feature norm") {
  LinUcbState s(3, 1.0);
  const Features d(0.3, -0.2, 0.7, 0.1);
  std::vector<Features> x{scaled(d, 0.5), scaled(d, 1.2), scaled(d, 0.9)};
  auto c = linucb_choose(s, x);
  CHECK(c.arm == 1);
  CHECK(c.scores[0] == doctest::Approx(0.5));
  CHECK(c.scores[1] == doctest::Approx(1.2));
  CHECK(c.scores[2] == doctest::Approx(0.9));
  CHECK(c.allocation[1] == 1.0);
  CHECK(c.allocation[0] == 0.0);

  std::vector<Features> same(3, d);
  CHECK(linucb_choose(s, same).arm == 0);
}

TEST_CASE("linucb pure exploitation follows the fitted response") {
  LinUcbState s(3, 0.0);
  const Features x(1.0, 0.0, 0.0, 0.0);
  // A_1 = I + x x^T = diag(2,1,1,1); b_1 = 1.8 x gives theta_1 . x = 0.9
  s.design[1] += x * x.transpose();
  s.response[1] = 1.8 * x;
  std::vector<Features> feats(3, x);
  auto c = linucb_choose(s, feats);
  CHECK(c.arm == 1);
  CHECK(c.scores[1] == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("linucb rank-one update") {
  LinUcbState s(2, 1.0);
  const Features x(1.0, 0.0, 0.0, 0.0);
  linucb_update(s, 0, x, 0.5);
  const Eigen::Vector4d diag(2, 1, 1, 1);
  CHECK((s.design[0] - Eigen::Matrix4d(diag.asDiagonal())).norm() == 0.0);
  CHECK(s.response[0] == Features(0.5, 0, 0, 0));
  CHECK(s.design[1] == Eigen::Matrix4d::Identity());
  CHECK(s.response[1] == Features::Zero());

  linucb_update(s, 1, Features(0.2, 0.3, 0.1, 0.4), 0.0);
  CHECK(s.response[1] == Features::Zero());
  CHECK(s.design[1] != Eigen::Matrix4d::Identity());
  CHECK_THROWS_AS(linucb_update(s, 1, x, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(linucb_update(s, 2, x, 0.5), std::out_of_range);
}

TEST_CASE("property: design matrices keep eigenvalues at least one") {
  Rng rng = make_stream(22, "linucb");
  std::uniform_real_distribution<double> f(0.0, 1.0);
  LinUcbState s(5, 1.0);
  for (int t = 0; t < 2000; ++t) {
    std::vector<Features> x(5);
    for (auto& v : x) v = Features(f(rng), f(rng), f(rng), f(rng) * 0.25);
    auto c = linucb_choose(s, x);
    auto c2 = linucb_choose(s, x);
    REQUIRE(c.arm == c2.arm);
    CHECK(c.allocation[c.arm] == 1.0);
    linucb_update(s, c.arm, x[c.arm], f(rng) * 0.25);
  }
  for (const auto& a : s.design) {
    CHECK((a - a.transpose()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(a);
    CHECK(eig.eigenvalues().minCoeff() >= 1.0 - 1e-9);
  }
}

TEST_CASE("latest features read the newest record") {
  auto s = with_revenues({0.1, 0.2});
  auto x = latest_features(s);
  CHECK(x.size() == 2);
  CHECK(x[1](0) == doctest::Approx(0.8));
  CHECK(x[1](1) == 0.5);
  CHECK(x[1](3) == 0.2);
}

}  // TEST_SUITE
