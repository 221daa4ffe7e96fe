#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "ia_arena/allocators.hpp"
#include "ia_arena/harness.hpp"
#include "ia_arena/random.hpp"

using namespace ia_arena;

namespace {

ExperimentConfig tiny(AllocatorKind kind, int sellers = 6) {
  ExperimentConfig c;
  c.sellers = sellers;
  c.group_size = std::max(sellers, 2);
  c.allocator = kind;
  c.episodes = 2;
  c.eval_episodes = 1;
  c.steps = 25;
  c.prefill_episodes = 1;
  c.seed = 3;
  c.agent.batch_size = 8;
  c.agent.buffer_capacity = 500;
  return c;
}

std::map<StrategyKind, int> tally(const Population& p) {
  std::map<StrategyKind, int> n;
  for (auto k : p.kinds) ++n[k];
  return n;
}

bool same_rows(const std::vector<MetricsRow>& a, const std::vector<MetricsRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].episode != b[i].episode || a[i].step != b[i].step || a[i].reward != b[i].reward ||
        a[i].critic_loss != b[i].critic_loss) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("population splits") {
  ExperimentConfig c;
  Rng rng(1);
  auto all = build_population(c, rng);
  CHECK(all.kinds.size() == 200);
  CHECK(tally(all)[StrategyKind::EpsGreedy] == 200);

  c.strategy_mix = {{StrategyKind::EpsGreedy, 0.25}, {StrategyKind::EpsFirst, 0.25},
                    {StrategyKind::Ucb1, 0.25}, {StrategyKind::Exp3, 0.25}};
  auto quarters = tally(build_population(c, rng));
  for (auto k : {StrategyKind::EpsGreedy, StrategyKind::EpsFirst, StrategyKind::Ucb1,
                 StrategyKind::Exp3}) {
    CHECK(quarters[k] == 50);
  }

  c.sellers = 10;
  c.strategy_mix = {{StrategyKind::Ucb1, 0.5}, {StrategyKind::Exp3, 0.5}};
  auto p = build_population(c, rng);
  CHECK(tally(p)[StrategyKind::Ucb1] == 5);
  CHECK(tally(p)[StrategyKind::Exp3] == 5);
  CHECK(p.kinds[4] == StrategyKind::Ucb1);
  CHECK(p.kinds[5] == StrategyKind::Exp3);

  c.strategy_mix = {{StrategyKind::Ucb1, 1.0 / 3}, {StrategyKind::Exp3, 1.0 / 3},
                    {StrategyKind::EpsFirst, 1.0 / 3}};
  auto thirds = tally(build_population(c, rng));
  CHECK(thirds[StrategyKind::Ucb1] == 3);
  CHECK(thirds[StrategyKind::Exp3] == 3);
  CHECK(thirds[StrategyKind::EpsFirst] == 4);

  c.strategy_mix = {{StrategyKind::Ucb1, 0.7}, {StrategyKind::Exp3, 0.7}};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("population costs come from the costs stream") {
  ExperimentConfig c = tiny(AllocatorKind::Greedy, 50);
  Rng a = make_stream(c.seed, "costs"), b = make_stream(c.seed, "costs");
  auto p = build_population(c, a);
  CHECK(p.costs == sample_costs(50, b));
}

TEST_CASE("pinned prices") {
  ExperimentConfig c = tiny(AllocatorKind::Greedy, 3);
  c.fixed_prices = {0.2, 0.5, 0.9};
  Rng rng(2);
  auto p = build_population(c, rng);
  CHECK(p.fixed_arms == std::vector<int>{20, 50, 90});
  auto sellers = make_sellers(c, p, 0, 3);
  for (long t = 0; t < 10; ++t) CHECK(sellers[2].choose(t).price == 0.9);
}

TEST_CASE("runs are reproducible and seed sensitive") {
  for (auto kind : {AllocatorKind::Greedy, AllocatorKind::LinUcb, AllocatorKind::Ddpg,
                    AllocatorKind::IaGru}) {
    auto c = tiny(kind);
    auto a = run_experiment(c);
    auto b = run_experiment(c);
    CHECK(same_rows(a.rows, b.rows));
    CHECK(a.checkpoint == b.checkpoint);
    c.seed = 4;
    CHECK_FALSE(same_rows(a.rows, run_experiment(c).rows));
  }
}

TEST_CASE("metrics table layout and reward bounds") {
  auto c = tiny(AllocatorKind::IaGru);
  auto r = run_experiment(c);
  CHECK(r.rows.size() == static_cast<std::size_t>((c.episodes + c.eval_episodes) * c.steps));
  int losses = 0;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    CHECK(row.episode == static_cast<int>(i) / c.steps);
    CHECK(row.step == static_cast<int>(i) % c.steps);
    CHECK(row.reward >= 0.0);
    CHECK(row.reward <= 0.25);
    CHECK_FALSE(row.wall_ms.has_value());
    if (row.episode >= c.episodes) CHECK_FALSE(row.critic_loss.has_value());
    losses += row.critic_loss.has_value();
  }
  CHECK(losses == c.episodes * c.steps);

  double eval = 0.0;
  for (const auto& row : r.rows) {
    if (row.episode >= c.episodes) eval += row.reward;
  }
  CHECK(r.mean_eval_reward == doctest::Approx(eval / (c.eval_episodes * c.steps)));
}

TEST_CASE("heuristics log no critic loss") {
  auto r = run_experiment(tiny(AllocatorKind::Greedy));
  for (const auto& row : r.rows) CHECK_FALSE(row.critic_loss.has_value());
  CHECK(r.checkpoint.empty());
}

TEST_CASE("fixed and variable regimes differ") {
  auto c = tiny(AllocatorKind::Greedy, 8);
  auto fixed = run_experiment(c);
  c.regime = SellerRegime::Variable;
  auto variable = run_experiment(c);
  CHECK_FALSE(same_rows(fixed.rows, variable.rows));
  CHECK(same_rows(variable.rows, run_experiment(c).rows));
}

TEST_CASE("evaluation leaves the agent untouched") {
  auto c = tiny(AllocatorKind::IaGru);
  Rng init(5), noise(6), replay(7);
  auto alloc = make_allocator(AllocatorKind::IaGru, c, 6, init);
  auto* agent = alloc->agent();
  REQUIRE(agent);
  const auto actor = agent->actor();
  const auto critic = agent->critic();
  MarketState s(1, 6);
  const std::vector<double> p(6, 0.4), costs(6, 0.1);
  for (int k = 0; k < 20; ++k) {
    auto q = alloc->act(s, Phase::Eval, 0, noise);
    auto step = market_step(s, p, q, costs);
    CHECK_FALSE(alloc->observe(s, q, step.reward, step.next, Phase::Eval, replay).has_value());
    s = step.next;
  }
  CHECK(agent->buffer().size() == 0);
  CHECK(agent->actor_optimizer().step == 0);
  for (int i = 0; i < actor.size(); ++i) CHECK(actor.block(i).value == agent->actor().block(i).value);
  for (int i = 0; i < critic.size(); ++i) {
    CHECK(critic.block(i).value == agent->critic().block(i).value);
  }
}

TEST_CASE("evaluation from a checkpoint skips training") {
  auto c = tiny(AllocatorKind::IaGru);
  auto trained = run_experiment(c);
  std::istringstream in(trained.checkpoint);
  auto blocks = nn::read_blocks(in);
  RunOptions opts;
  opts.train = false;
  opts.checkpoint = &blocks;
  auto eval = run_experiment(c, opts);
  REQUIRE(eval.rows.size() == static_cast<std::size_t>(c.eval_episodes * c.steps));
  const std::size_t offset = trained.rows.size() - eval.rows.size();
  // sellers and noise streams differ in history, so only the layout is comparable
  CHECK(eval.rows.front().episode == trained.rows[offset].episode);
  CHECK(std::isfinite(eval.mean_eval_reward));
}

TEST_CASE("scale and solve") {
  CHECK(group_count(400, 200) == 2);
  CHECK(group_count(10000, 200) == 50);
  CHECK(group_count(401, 200) == 3);

  for (auto kind : {AllocatorKind::Greedy, AllocatorKind::IaGru}) {
    auto c = tiny(kind, 400);
    c.group_size = 200;
    c.steps = 10;
    c.episodes = 1;
    auto r = scale_and_solve(c);
    CHECK(r.groups == 2);
    REQUIRE(r.allocation_mass.size() == r.rows.size());
    for (double mass : r.allocation_mass) CHECK(std::abs(mass - 1.0) < 1e-9);
    for (const auto& row : r.rows) CHECK(row.reward <= 0.25);
    CHECK(same_rows(r.rows, scale_and_solve(c).rows));
  }

  auto single = tiny(AllocatorKind::IaGru, 12);
  single.group_size = 12;
  CHECK(same_rows(scale_and_solve(single).rows, run_experiment(single).rows));

  auto bad = tiny(AllocatorKind::Greedy, 12);
  bad.group_size = 1;
  CHECK_THROWS_AS(scale_and_solve(bad), std::invalid_argument);
}

TEST_CASE("uneven last group") {
  auto c = tiny(AllocatorKind::Greedy, 25);
  c.group_size = 10;
  auto r = scale_and_solve(c);
  CHECK(r.groups == 3);
  for (double mass : r.allocation_mass) CHECK(std::abs(mass - 1.0) < 1e-9);
}

TEST_CASE("csv writers") {
  std::vector<MetricsRow> rows{{0, 0, 0.125, std::nullopt, std::nullopt},
                               {0, 1, 0.1, 0.5, std::nullopt},
                               {1, 0, 0.2, std::nullopt, 12.5}};
  std::ostringstream out;
  write_metrics_csv(out, rows);
  CHECK(out.str() ==
        "episode,step,reward,critic_loss,wall_ms\n"
        "0,0,0.125,,\n"
        "0,1,0.1,0.5,\n"
        "1,0,0.2,,12.5\n");

  ExperimentConfig c;
  c.allocator = AllocatorKind::Greedy;
  auto s = summarize(c, AllocatorKind::Greedy, {0.1, 0.2, 0.3});
  CHECK(s.seeds == 3);
  CHECK(s.mean_eval_reward == doctest::Approx(0.2));
  CHECK(s.std_eval_reward == doctest::Approx(0.1));
  CHECK(s.config_hash == config_hash(c));
  CHECK(summarize(c, AllocatorKind::IaGru, {0.1}).config_hash != s.config_hash);
  std::ostringstream sum;
  write_summary_csv(sum, {s});
  CHECK(sum.str().rfind("allocator,config_hash,seeds,mean_eval_reward,std_eval_reward\ngreedy,", 0) == 0);

  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-20) == "1e-20");
}

TEST_CASE("wall clock column when requested") {
  auto c = tiny(AllocatorKind::Greedy);
  c.record_wall_clock = true;
  auto r = run_experiment(c);
  for (const auto& row : r.rows) CHECK(row.wall_ms.has_value());
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(37, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS(parallel_for(4, [](std::size_t i) {
    if (i == 2) throw std::runtime_error("boom");
  }));
}

}  // TEST_SUITE
