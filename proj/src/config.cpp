#include "ia_arena/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace ia_arena {
namespace {

StrategyKind parse_mix_kind(const std::string& name) {
  if (name == "greedy") return StrategyKind::EpsGreedy;
  if (name == "first") return StrategyKind::EpsFirst;
  if (name == "ucb") return StrategyKind::Ucb1;
  StrategyKind k = parse_strategy_kind(name);
  if (k == StrategyKind::Fixed) throw std::invalid_argument("use fixed_prices to pin sellers");
  return k;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "sellers", "regime", "strategy_mix", "allocator", "episodes", "eval_episodes", "steps",
      "window", "grid", "seed", "group_size", "fixed_prices", "prefill_episodes",
      "linucb_alpha", "record_wall_clock", "eps_greedy_mean", "eps_greedy_stddev",
      "eps_first_horizon", "eps_first_epsilon", "exp3_gamma", "ucb1_textbook", "gamma", "tau",
      "actor_lr", "critic_lr", "batch_size", "buffer_capacity", "ddpg_hidden",
      "background_hidden", "seller_hidden", "head_hidden", "share_scaling", "noise_mean",
      "noise_decay", "noise_std"};
  return keys;
}

}  // namespace

std::string_view to_string(SellerRegime regime) {
  return regime == SellerRegime::Fixed ? "fixed" : "variable";
}

std::string_view to_string(AllocatorKind kind) {
  switch (kind) {
    case AllocatorKind::Greedy: return "greedy";
    case AllocatorKind::LinUcb: return "linucb";
    case AllocatorKind::Ddpg: return "ddpg";
    case AllocatorKind::IaGru: return "iagru";
  }
  return "unknown";
}

AllocatorKind parse_allocator_kind(std::string_view name) {
  for (auto k : {AllocatorKind::Greedy, AllocatorKind::LinUcb, AllocatorKind::Ddpg,
                 AllocatorKind::IaGru}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown allocator '" + std::string(name) + "'");
}

bool is_learning(AllocatorKind kind) {
  return kind == AllocatorKind::Ddpg || kind == AllocatorKind::IaGru;
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(c.sellers >= 1, "sellers must be positive");
  require(c.episodes >= 0 && c.eval_episodes >= 0, "episode counts must be nonnegative");
  require(c.steps >= 1, "steps must be positive");
  require(c.window >= 1, "window must be positive");
  require(c.grid >= 1, "grid must be positive");
  require(c.group_size >= 2, "group_size must be at least 2");
  require(c.prefill_episodes >= 0, "prefill_episodes must be nonnegative");
  require(!c.strategy_mix.empty(), "strategy_mix must name at least one strategy");
  double total = 0.0;
  for (const auto& s : c.strategy_mix) {
    require(s.fraction >= 0.0, "strategy fractions must be nonnegative");
    total += s.fraction;
  }
  require(std::abs(total - 1.0) <= 1e-9, "strategy fractions must sum to 1");
  if (!c.fixed_prices.empty()) {
    require(c.fixed_prices.size() == static_cast<std::size_t>(c.sellers),
            "fixed_prices needs one price per seller");
    PriceGrid grid(c.grid);
    for (double p : c.fixed_prices) require(grid.on_grid(p), "fixed prices must lie on the grid");
  }
  require(c.agent.batch_size >= 1, "batch_size must be positive");
  require(c.agent.buffer_capacity >= 1, "buffer_capacity must be positive");
  require(c.agent.tau > 0.0 && c.agent.tau <= 1.0, "tau must lie in (0, 1]");
  require(c.agent.gamma >= 0.0 && c.agent.gamma < 1.0, "gamma must lie in [0, 1)");
  require(c.strategy.exp3_gamma > 0.0 && c.strategy.exp3_gamma <= 1.0,
          "exp3_gamma must lie in (0, 1]");
  require(c.noise.stddev >= 0.0, "noise_std must be nonnegative");
}

Json to_json(const ExperimentConfig& c) {
  Json mix = Json::object();
  for (const auto& s : c.strategy_mix) mix[std::string(to_string(s.kind))] = s.fraction;
  Json doc;
  doc["sellers"] = c.sellers;
  doc["regime"] = to_string(c.regime);
  doc["strategy_mix"] = mix;
  doc["allocator"] = to_string(c.allocator);
  doc["episodes"] = c.episodes;
  doc["eval_episodes"] = c.eval_episodes;
  doc["steps"] = c.steps;
  doc["window"] = c.window;
  doc["grid"] = c.grid;
  doc["seed"] = c.seed;
  doc["group_size"] = c.group_size;
  doc["fixed_prices"] = c.fixed_prices;
  doc["prefill_episodes"] = c.prefill_episodes;
  doc["linucb_alpha"] = c.linucb_alpha;
  doc["record_wall_clock"] = c.record_wall_clock;
  doc["eps_greedy_mean"] = c.strategy.eps_greedy_mean;
  doc["eps_greedy_stddev"] = c.strategy.eps_greedy_stddev;
  doc["eps_first_horizon"] = c.strategy.eps_first_horizon;
  doc["eps_first_epsilon"] = c.strategy.eps_first_epsilon;
  doc["exp3_gamma"] = c.strategy.exp3_gamma;
  doc["ucb1_textbook"] = c.strategy.ucb1_textbook;
  doc["gamma"] = c.agent.gamma;
  doc["tau"] = c.agent.tau;
  doc["actor_lr"] = c.agent.actor_lr;
  doc["critic_lr"] = c.agent.critic_lr;
  doc["batch_size"] = c.agent.batch_size;
  doc["buffer_capacity"] = c.agent.buffer_capacity;
  doc["ddpg_hidden"] = c.agent.ddpg_hidden;
  doc["background_hidden"] = c.agent.background_hidden;
  doc["seller_hidden"] = c.agent.seller_hidden;
  doc["head_hidden"] = c.agent.head_hidden;
  doc["share_scaling"] = c.agent.share_scaling;
  doc["noise_mean"] = c.noise.initial_mean;
  doc["noise_decay"] = c.noise.decay;
  doc["noise_std"] = c.noise.stddev;
  return doc;
}

ExperimentConfig config_from_json(const Json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!known_keys().count(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  auto get = [&](const char* key, auto& field) {
    if (doc.contains(key)) {
      try {
        doc.at(key).get_to(field);
      } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config key '") + key + "': " + e.what());
      }
    }
  };
  get("sellers", c.sellers);
  if (doc.contains("regime")) {
    const std::string r = doc.at("regime").get<std::string>();
    if (r == "fixed") c.regime = SellerRegime::Fixed;
    else if (r == "variable") c.regime = SellerRegime::Variable;
    else throw std::invalid_argument("regime must be 'fixed' or 'variable'");
  }
  if (doc.contains("strategy_mix")) {
    const Json& mix = doc.at("strategy_mix");
    c.strategy_mix.clear();
    if (mix.is_string()) {
      c.strategy_mix.push_back({parse_mix_kind(mix.get<std::string>()), 1.0});
    } else if (mix.is_object()) {
      for (const auto& [name, frac] : mix.items()) {
        c.strategy_mix.push_back({parse_mix_kind(name), frac.get<double>()});
      }
    } else {
      throw std::invalid_argument("strategy_mix must be a name or an object of fractions");
    }
  }
  if (doc.contains("allocator")) {
    c.allocator = parse_allocator_kind(doc.at("allocator").get<std::string>());
  }
  get("episodes", c.episodes);
  get("eval_episodes", c.eval_episodes);
  get("steps", c.steps);
  get("window", c.window);
  get("grid", c.grid);
  get("seed", c.seed);
  get("group_size", c.group_size);
  get("fixed_prices", c.fixed_prices);
  get("prefill_episodes", c.prefill_episodes);
  get("linucb_alpha", c.linucb_alpha);
  get("record_wall_clock", c.record_wall_clock);
  get("eps_greedy_mean", c.strategy.eps_greedy_mean);
  get("eps_greedy_stddev", c.strategy.eps_greedy_stddev);
  get("eps_first_horizon", c.strategy.eps_first_horizon);
  get("eps_first_epsilon", c.strategy.eps_first_epsilon);
  get("exp3_gamma", c.strategy.exp3_gamma);
  get("ucb1_textbook", c.strategy.ucb1_textbook);
  get("gamma", c.agent.gamma);
  get("tau", c.agent.tau);
  get("actor_lr", c.agent.actor_lr);
  get("critic_lr", c.agent.critic_lr);
  get("batch_size", c.agent.batch_size);
  get("buffer_capacity", c.agent.buffer_capacity);
  get("ddpg_hidden", c.agent.ddpg_hidden);
  get("background_hidden", c.agent.background_hidden);
  get("seller_hidden", c.agent.seller_hidden);
  get("head_hidden", c.agent.head_hidden);
  get("share_scaling", c.agent.share_scaling);
  get("noise_mean", c.noise.initial_mean);
  get("noise_decay", c.noise.decay);
  get("noise_std", c.noise.stddev);
  c.agent.window = c.window;
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed config '" + path + "': " + e.what());
  }
  return config_from_json(doc);
}

void apply_override(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw std::invalid_argument("override must look like key=value, got '" +
                                std::string(assignment) + "'");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string value(assignment.substr(eq + 1));
  if (!known_keys().count(key)) throw std::invalid_argument("unknown override key '" + key + "'");
  Json parsed = Json::parse(value, nullptr, false);
  doc[key] = parsed.is_discarded() ? Json(value) : parsed;
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(to_json(config).dump())));
  return buf;
}

}  // namespace ia_arena
