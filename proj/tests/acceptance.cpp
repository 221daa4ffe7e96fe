// Acceptance gates: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// The learning checks train real agents and take tens of minutes on one core.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ia_arena/baselines.hpp"
#include "ia_arena/cli.hpp"
#include "ia_arena/harness.hpp"
#include "ia_arena/market.hpp"
#include "ia_arena/nn/gradcheck.hpp"
#include "ia_arena/nn/optim.hpp"
#include "ia_arena/random.hpp"
#include "ia_arena/rl/ddpg.hpp"
#include "ia_arena/rl/iagru.hpp"
#include "ia_arena/strategies.hpp"

using namespace ia_arena;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Same per-seed derivation as `--seeds N`.
std::uint64_t seed_k(std::uint64_t base, int k) {
  return k == 0 ? base : derive_seed(base, "seed", static_cast<std::uint64_t>(k));
}

// Shorter runs than the full 1000 episodes get a faster noise decay so the
// schedule still ends at the level 0.995^1000 reaches.
void match_noise_horizon(ExperimentConfig& c) {
  c.noise.decay = std::pow(0.995, 1000.0 / c.episodes);
}

std::vector<double> simplex(std::size_t m, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> q(m);
  for (double& x : q) x = e(rng);
  const double s = std::accumulate(q.begin(), q.end(), 0.0);
  for (double& x : q) x /= s;
  return q;
}

// ---------------------------------------------------------------------------

Verdict analytic_oracle() {
  Rng rng = make_stream(1, "acceptance-oracle");
  double worst = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t m = 1 + trial % 50;
    const std::vector<double> prices(m, 0.5);
    const auto costs = sample_costs(m, rng);
    auto q = simplex(m, rng);
    if (trial % 7 == 0) q.assign(m, 0.0), q[trial % m] = 1.0;
    const auto r = market_step(MarketState(1, static_cast<int>(m)), prices, Allocation(q), costs);
    worst = std::max(worst, std::abs(r.reward - 0.25));
  }
  return {worst <= 1e-12, "max |reward - 0.25| = " + fmt(worst) + " over 2000 allocations"};
}

ExperimentConfig fixed_price_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.sellers = 10;
  c.group_size = 10;
  c.allocator = AllocatorKind::IaGru;
  c.episodes = 100;
  c.eval_episodes = 10;
  c.steps = 200;
  c.seed = seed;
  match_noise_horizon(c);
  // ten distinct grid prices, drawn per seed
  Rng rng = make_stream(seed, "fixed-prices");
  std::vector<int> arms(c.grid + 1);
  std::iota(arms.begin(), arms.end(), 0);
  std::shuffle(arms.begin(), arms.end(), rng);
  for (int i = 0; i < c.sellers; ++i) c.fixed_prices.push_back(PriceGrid(c.grid).price(arms[i]));
  return c;
}

Verdict fixed_price_optimality() {
  int wins = 0;
  std::string detail;
  for (int k = 0; k < 3; ++k) {
    const auto c = fixed_price_config(seed_k(0, k));
    double best = 0.0;
    for (double p : c.fixed_prices) best = std::max(best, p * (1 - p));
    const auto r = run_experiment(c);
    const bool ok = r.mean_eval_reward >= 0.95 * best;
    wins += ok;
    detail += (k ? "; " : "") + std::string("seed") + std::to_string(k) + " " +
              fmt(r.mean_eval_reward) + " vs 0.95*" + fmt(best);
  }
  return {wins >= 2, std::to_string(wins) + "/3 seeds [" + detail + "]"};
}

ExperimentConfig desk_config(AllocatorKind kind, std::uint64_t seed) {
  ExperimentConfig c;
  c.sellers = 20;
  c.group_size = 20;
  c.regime = SellerRegime::Fixed;
  c.strategy_mix = {{StrategyKind::EpsGreedy, 1.0}};
  c.allocator = kind;
  c.episodes = 200;
  c.eval_episodes = 20;
  c.steps = 200;
  c.seed = seed;
  match_noise_horizon(c);
  return c;
}

struct DeskRuns {
  std::vector<double> greedy, iagru;
  std::vector<ExperimentResult> iagru_runs;
};

const DeskRuns& desk_runs() {
  static const DeskRuns runs = [] {
    DeskRuns d;
    for (int k = 0; k < 3; ++k) {
      const auto seed = seed_k(0, k);
      d.greedy.push_back(run_experiment(desk_config(AllocatorKind::Greedy, seed)).mean_eval_reward);
      d.iagru_runs.push_back(run_experiment(desk_config(AllocatorKind::IaGru, seed)));
      d.iagru.push_back(d.iagru_runs.back().mean_eval_reward);
    }
    return d;
  }();
  return runs;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

Verdict desk_comparison() {
  const auto& d = desk_runs();
  const double g = mean_of(d.greedy), ia = mean_of(d.iagru);
  std::string per;
  for (int k = 0; k < 3; ++k) {
    per += (k ? "; " : "") + fmt(d.iagru[k]) + " vs " + fmt(d.greedy[k]);
  }
  return {ia > g, "iagru " + fmt(ia) + " vs greedy " + fmt(g) + " [" + per + "]"};
}

Verdict critic_convergence() {
  const auto& d = desk_runs();
  bool ok = true;
  std::string detail;
  for (std::size_t k = 0; k < d.iagru_runs.size(); ++k) {
    std::vector<double> loss;
    for (const auto& row : d.iagru_runs[k].rows) {
      if (row.critic_loss) loss.push_back(*row.critic_loss);
    }
    const std::size_t tenth = loss.size() / 10;
    const double first = std::accumulate(loss.begin(), loss.begin() + tenth, 0.0) / tenth;
    const double last = std::accumulate(loss.end() - tenth, loss.end(), 0.0) / tenth;
    ok = ok && tenth > 0 && last < first;
    detail += (k ? "; " : "") + fmt(first) + " -> " + fmt(last);
  }
  return {ok, detail};
}

// perm[k] = original seller shown at position k.
MarketState permuted(const MarketState& s, const std::vector<int>& perm) {
  const auto src = s.flat();
  std::vector<double> out(src.size());
  const int m = s.sellers(), f = SellerRecord::kFields;
  for (int t = 0; t < s.window(); ++t) {
    for (int k = 0; k < m; ++k) {
      std::copy_n(src.begin() + (t * m + perm[k]) * f, f, out.begin() + (t * m + k) * f);
    }
  }
  return MarketState::from_flat(s.window(), m, s.round(), out);
}

Verdict permutation_suite() {
  constexpr int m = 10;
  Rng rng = make_stream(2, "acceptance-perm");
  rl::AgentConfig cfg;
  cfg.sellers = m;
  rl::IaGruAgent ia(cfg, rng);
  rl::DdpgAgent dd(cfg, rng);
  PriceGrid grid(100);
  std::uniform_real_distribution<double> imp(0.0, 1.0 / m);
  std::uniform_int_distribution<int> arm(1, 99);
  double worst_ia = 0.0, worst_ddpg = 0.0;
  int states = 0;
  while (states < 1000) {
    std::vector<double> flat;
    std::set<double> revenues;
    for (int i = 0; i < m; ++i) {
      const double v = imp(rng), p = grid.price(arm(rng)), n = (1 - p) * v;
      flat.insert(flat.end(), {v, p, n, p * n});
      revenues.insert(p * n);
    }
    if (revenues.size() != m) continue;
    ++states;
    const auto s = MarketState::from_flat(1, m, 1, flat);
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto ps = permuted(s, perm);
    const auto a = ia.act(s), b = ia.act(ps), c = dd.act(s), e = dd.act(ps);
    const auto q = simplex(m, rng);
    std::vector<double> pq(m);
    for (int k = 0; k < m; ++k) {
      worst_ia = std::max(worst_ia, std::abs(b[k] - a[perm[k]]));
      worst_ddpg = std::max(worst_ddpg, std::abs(e[k] - c[perm[k]]));
      pq[k] = q[perm[k]];
    }
    worst_ia = std::max(worst_ia, std::abs(ia.q_value(s, Allocation(q)) -
                                           ia.q_value(ps, Allocation(pq))));
  }
  return {worst_ia < 1e-9 && worst_ddpg > 1e-3,
          "iagru max deviation " + fmt(worst_ia) + ", ddpg max deviation " + fmt(worst_ddpg)};
}

Verdict gradient_suite() {
  nn::GradCheckOptions opts;
  opts.instances = 100;
  bool ok = true;
  double worst = 0.0;
  std::string failed;
  const auto results = nn::run_gradcheck_suite(opts);
  for (const auto& r : results) {
    ok = ok && r.passed && r.max_relative_error < 1e-4;
    worst = std::max(worst, r.max_relative_error);
    if (!r.passed) failed += " " + r.name;
  }
  return {ok, std::to_string(results.size()) + " checks, worst relative error " + fmt(worst) +
                  (failed.empty() ? "" : ", failed:" + failed)};
}

// Share of rounds 500..1000 on the arm paying Bernoulli(0.8) rather than 0.2.
template <class Choose, class Update>
double better_arm_share(Choose choose, Update update, Rng& env) {
  std::bernoulli_distribution good(0.8), bad(0.2);
  int hits = 0, rounds = 0;
  for (long t = 0; t <= 1000; ++t) {
    const int arm = choose(t);
    update(arm, t, arm == 0 ? good(env) : bad(env));
    if (t >= 500) ++rounds, hits += arm == 0;
  }
  return static_cast<double>(hits) / rounds;
}

Verdict bandit_sanity() {
  PriceGrid two(1);
  double exp3_share = 0.0, greedy_share = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng env = make_stream(seed, "acceptance-env"), rng = make_stream(seed, "acceptance-learner");
    auto e = Exp3State::uniform(2, 0.1);
    exp3_share += better_arm_share([&](long) { return exp3_choose(e, two, rng).arm; },
                                   [&](int a, long, double u) { exp3_update(e, a, u); }, env);
    EpsGreedyState g{ArmStatistics(2), 0.1};
    greedy_share += better_arm_share([&](long) { return eps_greedy_choose(g, two, rng).arm; },
                                     [&](int a, long, double u) { g.stats.observe(a, u); }, env);
  }
  exp3_share /= 20;
  greedy_share /= 20;

  PriceGrid grid(100);
  Rng rng = make_stream(3, "acceptance-exp3");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto s = Exp3State::uniform(grid.arms(), 0.1);
  const double floor = 0.1 / grid.arms();
  double lowest = 1.0;
  for (int i = 0; i < 100000; ++i) {
    const int arm = exp3_choose(s, grid, rng).arm;
    exp3_update(s, arm, arm == 42 ? 1.0 : 0.2 * unit(rng));
    for (double p : exp3_probabilities(s)) lowest = std::min(lowest, p);
  }
  return {exp3_share > 0.6 && greedy_share > 0.6 && lowest >= floor,
          "exp3 " + fmt(exp3_share) + ", eps-greedy " + fmt(greedy_share) +
              ", lowest exp3 probability " + fmt(lowest) + " (floor " + fmt(floor) + ")"};
}

Verdict hand_values() {
  std::vector<std::string> bad;

  auto s = Exp3State::uniform(5, 0.1);
  exp3_update(s, 2, scale_payoff(0.08));
  if (!(std::abs(s.weight(2) - std::exp(0.054)) <= 1e-9)) bad.push_back("exp3");

  // l = 0.25 v at price 0.5
  std::vector<double> flat;
  for (double l : {0.01, 0.01, 0.02, 0.0}) flat.insert(flat.end(), {4 * l, 0.5, 2 * l, l});
  const auto q = greedy_myopic(MarketState::from_flat(1, 4, 1, flat));
  const double want[] = {0.25, 0.25, 0.5, 0.0};
  for (int i = 0; i < 4; ++i) {
    if (std::abs(q[i] - want[i]) > 1e-15) bad.push_back("greedy");
  }

  nn::ParamSet target, online;
  target.add("w", nn::Mat::Zero(1, 1));
  online.add("w", nn::Mat::Ones(1, 1));
  nn::soft_update(target, online, 1e-3);
  if (std::abs(target.block(0).value(0, 0) - 0.001) > 1e-15) bad.push_back("soft_update");

  nn::ParamSet p;
  p.add("w", nn::Mat::Ones(1, 1));
  nn::AdamState adam(p, nn::AdamConfig{});
  p.block(0).grad(0, 0) = 0.37;
  nn::adam_step(p, adam);
  const double moved = 1.0 - p.block(0).value(0, 0);
  if (std::abs(moved - 1e-4) > 1e-4 * 1e-4) bad.push_back("adam");

  std::string detail = "exp3 weight " + fmt(s.weight(2)) + ", greedy [" + fmt(q[0]) + "," +
                       fmt(q[1]) + "," + fmt(q[2]) + "," + fmt(q[3]) + "], soft_update " +
                       fmt(target.block(0).value(0, 0)) + ", adam step " + fmt(moved);
  for (const auto& b : bad) detail += " BAD:" + b;
  return {bad.empty(), detail};
}

bool same_rows(const std::vector<MetricsRow>& a, const std::vector<MetricsRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].reward != b[i].reward || a[i].critic_loss != b[i].critic_loss) return false;
  }
  return true;
}

Verdict scale_and_solve_consistency() {
  bool ok = true;
  double worst = 0.0;
  for (auto kind : {AllocatorKind::Greedy, AllocatorKind::IaGru}) {
    ExperimentConfig c;
    c.sellers = 400;
    c.group_size = 200;
    c.allocator = kind;
    c.episodes = 1;
    c.eval_episodes = 1;
    c.steps = 20;
    c.prefill_episodes = 1;
    c.seed = 9;
    const auto a = scale_and_solve(c), b = scale_and_solve(c);
    ok = ok && a.groups == 2 && same_rows(a.rows, b.rows) && a.checkpoint == b.checkpoint;
    for (double mass : a.allocation_mass) worst = std::max(worst, std::abs(mass - 1.0));
  }
  return {ok && worst < 1e-9,
          "2 groups, max |mass - 1| = " + fmt(worst) + ", repeat runs identical: " + (ok ? "yes" : "no")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict compare_reproducible() {
  const fs::path root = fs::current_path() / "acceptance_compare";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ofstream(root / "exp.json") << R"({"sellers": 8, "episodes": 3, "eval_episodes": 2,
    "steps": 40, "prefill_episodes": 1, "batch_size": 16, "seed": 21,
    "strategy_mix": {"eps_greedy": 0.25, "eps_first": 0.25, "ucb1": 0.25, "exp3": 0.25}})";
  std::ostringstream out, err;
  for (const char* dir : {"a", "b"}) {
    const int code = run_cli({"compare", "--config", (root / "exp.json").string(), "--out",
                              (root / dir).string()},
                             out, err);
    if (code != 0) return {false, "compare exited " + std::to_string(code) + ": " + err.str()};
  }
  int files = 0;
  bool same = true;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    if (e.path().extension() != ".csv") continue;
    ++files;
    same = same && slurp(e.path()) == slurp(root / "b" / e.path().filename());
  }
  return {same && files == 5, std::to_string(files) + " csv files, byte-identical: " + (same ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"analytic environment oracle", analytic_oracle},
      {"permutation suite", permutation_suite},
      {"gradient suite", gradient_suite},
      {"bandit sanity", bandit_sanity},
      {"hand-computed unit values", hand_values},
      {"scale-and-solve consistency", scale_and_solve_consistency},
      {"compare reproducibility", compare_reproducible},
      {"fixed-price optimality", fixed_price_optimality},
      {"desk-scale comparison", desk_comparison},
      {"critic-loss convergence", critic_convergence},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << " ("
              << fmt(secs) << " s)" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
