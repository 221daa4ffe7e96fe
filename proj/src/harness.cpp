#include "ia_arena/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ia_arena/allocators.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace ia_arena {
namespace {

// The tape allocates and frees many mid-sized matrices per step; glibc's default
// mmap threshold turns each into a syscall pair. Keep them on the heap instead.
void tune_allocator() {
#if defined(__GLIBC__)
  static std::once_flag once;
  std::call_once(once, [] {
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);
    mallopt(M_TOP_PAD, 256 << 20);
  });
#endif
}

struct GroupRun {
  std::vector<MetricsRow> rows;
  std::vector<double> mass;
  std::string checkpoint;
};

GroupRun run_group(const ExperimentConfig& config, const Population& population, int group,
                   int groups, const RunOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  const std::size_t first = static_cast<std::size_t>(group) * config.group_size;
  const std::size_t count =
      std::min<std::size_t>(config.group_size, static_cast<std::size_t>(config.sellers) - first);
  const int m = static_cast<int>(count);
  const double share = 1.0 / groups;

  std::vector<Seller> sellers = make_sellers(config, population, first, count);
  Rng init_rng = make_stream(config.seed, "allocator_init", group);
  Rng noise_rng = make_stream(config.seed, "noise", group);
  Rng replay_rng = make_stream(config.seed, "replay", group);
  Rng round_cost_rng = make_stream(config.seed, "round_costs", group);
  auto allocator = make_allocator(config.allocator, config, m, init_rng);
  const std::string prefix = "group" + std::to_string(group) + "/";
  if (options.checkpoint) {
    if (!allocator->agent()) throw std::invalid_argument("checkpoints apply to learning allocators only");
    allocator->agent()->load(*options.checkpoint, prefix);
  }

  GroupRun out;
  std::vector<double> prices(m), costs(m);
  std::vector<int> arms(m);
  auto play_episode = [&](Phase phase, int episode, bool record) {
    for (auto& s : sellers) s.reset();
    MarketState state(config.window, m);
    for (int step = 0; step < config.steps; ++step) {
      if (config.regime == SellerRegime::Variable) {
        const auto fresh = sample_costs(count, round_cost_rng);
        for (int i = 0; i < m; ++i) sellers[i].set_cost(fresh[i]);
      }
      double ceiling = 0.0;
      for (int i = 0; i < m; ++i) {
        const PriceChoice c = sellers[i].choose(step);
        arms[i] = c.arm;
        prices[i] = c.price;
        costs[i] = sellers[i].cost();
        ceiling = std::max(ceiling, c.price * (1.0 - c.price));
      }
      const Allocation q = allocator->act(state, phase, episode, noise_rng);
      StepResult result = market_step(state, prices, q, costs, share);
      if (result.reward > share * ceiling + 1e-12) {
        throw std::logic_error("round reward exceeds the best single-seller revenue");
      }
      for (int i = 0; i < m; ++i) sellers[i].observe(arms[i], step, result.payoffs[i]);
      auto loss = allocator->observe(state, q, result.reward, result.next, phase, replay_rng);
      if (record) {
        MetricsRow row{episode, step, result.reward, loss, std::nullopt};
        if (config.record_wall_clock) {
          row.wall_ms =
              std::chrono::duration<double, std::milli>(Clock::now() - started).count();
        }
        out.rows.push_back(row);
        double mass = 0.0;
        for (double x : q.values()) mass += share * x;
        out.mass.push_back(mass);
      }
      state = std::move(result.next);
    }
  };

  if (options.train) {
    if (allocator->wants_prefill()) {
      for (int e = 0; e < config.prefill_episodes; ++e) play_episode(Phase::Prefill, e, false);
    }
    for (int e = 0; e < config.episodes; ++e) play_episode(Phase::Train, e, true);
  }
  for (int e = 0; e < config.eval_episodes; ++e) {
    play_episode(Phase::Eval, config.episodes + e, true);
  }
  if (allocator->agent()) {
    std::ostringstream ckpt;
    allocator->agent()->save(ckpt, prefix);
    out.checkpoint = ckpt.str();
  }
  return out;
}

}  // namespace

Population build_population(const ExperimentConfig& config, Rng& cost_rng) {
  validate(config);
  const auto m = static_cast<std::size_t>(config.sellers);
  Population p;
  p.costs = sample_costs(m, cost_rng);
  if (!config.fixed_prices.empty()) {
    p.kinds.assign(m, StrategyKind::Fixed);
    for (double price : config.fixed_prices) {
      p.fixed_arms.push_back(static_cast<int>(std::lround(price * config.grid)));
    }
    return p;
  }
  for (std::size_t k = 0; k < config.strategy_mix.size(); ++k) {
    const auto& share = config.strategy_mix[k];
    std::size_t n = k + 1 == config.strategy_mix.size()
                        ? m - p.kinds.size()
                        : static_cast<std::size_t>(std::floor(share.fraction * m + 1e-9));
    n = std::min(n, m - p.kinds.size());
    p.kinds.insert(p.kinds.end(), n, share.kind);
  }
  return p;
}

std::vector<Seller> make_sellers(const ExperimentConfig& config, const Population& population,
                                 std::size_t first, std::size_t count) {
  const PriceGrid grid(config.grid);
  std::vector<Seller> sellers;
  sellers.reserve(count);
  for (std::size_t i = first; i < first + count; ++i) {
    const int arm = population.fixed_arms.empty() ? 0 : population.fixed_arms[i];
    sellers.emplace_back(population.kinds[i], population.costs[i], grid, config.strategy,
                         make_stream(config.seed, "seller", i), arm);
  }
  return sellers;
}

int group_count(int sellers, int group_size) {
  if (group_size < 2) throw std::invalid_argument("group size must be at least 2");
  return (sellers + group_size - 1) / group_size;
}

double mean_eval_reward(const std::vector<MetricsRow>& rows, int train_episodes) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (r.episode >= train_episodes) {
      total += r.reward;
      ++n;
    }
  }
  return n ? total / static_cast<double>(n) : 0.0;
}

ExperimentResult scale_and_solve(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  tune_allocator();
  const int groups = group_count(config.sellers, config.group_size);
  Rng cost_rng = make_stream(config.seed, "costs");
  const Population population = build_population(config, cost_rng);

  std::vector<GroupRun> runs(groups);
  parallel_for(groups, [&](std::size_t g) {
    runs[g] = run_group(config, population, static_cast<int>(g), groups, options);
  });

  ExperimentResult result;
  result.groups = groups;
  result.rows = runs[0].rows;
  result.allocation_mass = runs[0].mass;
  for (int g = 1; g < groups; ++g) {
    for (std::size_t r = 0; r < result.rows.size(); ++r) {
      MetricsRow& row = result.rows[r];
      const MetricsRow& other = runs[g].rows[r];
      row.reward += other.reward;
      if (row.critic_loss && other.critic_loss) *row.critic_loss += *other.critic_loss;
      if (row.wall_ms && other.wall_ms) row.wall_ms = std::max(*row.wall_ms, *other.wall_ms);
      result.allocation_mass[r] += runs[g].mass[r];
    }
  }
  if (groups > 1) {
    for (auto& row : result.rows) {
      if (row.critic_loss) *row.critic_loss /= groups;
    }
  }
  for (const auto& run : runs) result.checkpoint += run.checkpoint;
  result.mean_eval_reward = mean_eval_reward(result.rows, config.episodes);
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  return scale_and_solve(config, options);
}

unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("IA_ARENA_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = static_cast<unsigned>(cap);
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(n, worker_threads());
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "episode,step,reward,critic_loss,wall_ms\n";
  for (const auto& r : rows) {
    out << r.episode << ',' << r.step << ',' << format_double(r.reward) << ',';
    if (r.critic_loss) out << format_double(*r.critic_loss);
    out << ',';
    if (r.wall_ms) out << format_double(std::round(*r.wall_ms * 1000.0) / 1000.0);
    out << '\n';
  }
}

SummaryRow summarize(const ExperimentConfig& config, AllocatorKind allocator,
                     const std::vector<double>& per_seed_rewards) {
  SummaryRow s;
  s.allocator = std::string(to_string(allocator));
  ExperimentConfig hashed = config;
  hashed.allocator = allocator;
  s.config_hash = config_hash(hashed);
  s.seeds = static_cast<int>(per_seed_rewards.size());
  if (per_seed_rewards.empty()) return s;
  double total = 0.0;
  for (double r : per_seed_rewards) total += r;
  s.mean_eval_reward = total / per_seed_rewards.size();
  if (per_seed_rewards.size() > 1) {
    double ss = 0.0;
    for (double r : per_seed_rewards) ss += (r - s.mean_eval_reward) * (r - s.mean_eval_reward);
    s.std_eval_reward = std::sqrt(ss / (per_seed_rewards.size() - 1));
  }
  return s;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "allocator,config_hash,seeds,mean_eval_reward,std_eval_reward\n";
  for (const auto& r : rows) {
    out << r.allocator << ',' << r.config_hash << ',' << r.seeds << ','
        << format_double(r.mean_eval_reward) << ',' << format_double(r.std_eval_reward) << '\n';
  }
}

}  // namespace ia_arena
