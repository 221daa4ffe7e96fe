#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ia_arena/config.hpp"
#include "ia_arena/nn/checkpoint.hpp"
#include "ia_arena/strategies.hpp"

namespace ia_arena {

struct MetricsRow {
  int episode = 0;
  int step = 0;
  double reward = 0.0;
  std::optional<double> critic_loss;
  // Milliseconds since the run started; absent unless wall-clock recording is on.
  std::optional<double> wall_ms;
};

struct Population {
  std::vector<double> costs;
  std::vector<StrategyKind> kinds;
  // Grid arm per seller for pinned sellers, otherwise empty.
  std::vector<int> fixed_arms;
};

Population build_population(const ExperimentConfig& config, Rng& cost_rng);
std::vector<Seller> make_sellers(const ExperimentConfig& config, const Population& population,
                                 std::size_t first, std::size_t count);

struct RunOptions {
  bool train = true;
  // Agent weights to start from, keyed as produced by ExperimentResult::checkpoint.
  const nn::BlockMap* checkpoint = nullptr;
};

struct ExperimentResult {
  std::vector<MetricsRow> rows;
  // Total impression mass handed out across all groups, one per row.
  std::vector<double> allocation_mass;
  double mean_eval_reward = 0.0;
  int groups = 1;
  // Serialised agents (learning allocators only).
  std::string checkpoint;
};

int group_count(int sellers, int group_size);

// Groups of group_size sellers (the last possibly smaller), each with an
// independent allocator and a 1/G share of the impressions, run in
// parallel; rewards add up across groups.
ExperimentResult scale_and_solve(const ExperimentConfig& config, const RunOptions& options = {});
// A single-group run is the one-group case of scale_and_solve.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

double mean_eval_reward(const std::vector<MetricsRow>& rows, int train_episodes);

// Worker cap from IA_ARENA_THREADS (default: hardware concurrency).
unsigned worker_threads();
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

struct SummaryRow {
  std::string allocator;
  std::string config_hash;
  int seeds = 1;
  double mean_eval_reward = 0.0;
  double std_eval_reward = 0.0;
};

SummaryRow summarize(const ExperimentConfig& config, AllocatorKind allocator,
                     const std::vector<double>& per_seed_rewards);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

std::string format_double(double x);

}  // namespace ia_arena
