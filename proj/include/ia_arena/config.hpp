#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ia_arena/rl/agent.hpp"
#include "ia_arena/strategies.hpp"

namespace ia_arena {

using Json = nlohmann::ordered_json;

enum class SellerRegime { Fixed, Variable };
enum class AllocatorKind { Greedy, LinUcb, Ddpg, IaGru };

std::string_view to_string(SellerRegime regime);
std::string_view to_string(AllocatorKind kind);
AllocatorKind parse_allocator_kind(std::string_view name);
bool is_learning(AllocatorKind kind);

struct StrategyShare {
  StrategyKind kind;
  double fraction;
};

struct ExperimentConfig {
  int sellers = 200;
  SellerRegime regime = SellerRegime::Fixed;
  // Assigned in index blocks, in this order; the last kind takes the remainder.
  std::vector<StrategyShare> strategy_mix = {{StrategyKind::EpsGreedy, 1.0}};
  AllocatorKind allocator = AllocatorKind::IaGru;
  int episodes = 1000;
  int eval_episodes = 1000;
  int steps = 1000;
  int window = 1;
  int grid = 100;
  std::uint64_t seed = 0;
  int group_size = 200;
  // When non-empty, seller i is pinned to price fixed_prices[i].
  std::vector<double> fixed_prices;
  int prefill_episodes = 5;
  double linucb_alpha = 1.0;
  bool record_wall_clock = false;
  StrategyParams strategy;
  rl::AgentConfig agent;
  rl::NoiseSchedule noise;
};

// Throws std::invalid_argument describing the first violated constraint.
void validate(const ExperimentConfig& config);

Json to_json(const ExperimentConfig& config);
// Unknown keys are rejected.
ExperimentConfig config_from_json(const Json& doc);
ExperimentConfig load_config(const std::string& path);
// Applies "key=value"; the value is parsed as JSON when possible and kept
// as a string otherwise. Unknown keys are rejected.
void apply_override(Json& doc, std::string_view assignment);
// Hex digest of the canonical JSON form.
std::string config_hash(const ExperimentConfig& config);

}  // namespace ia_arena
