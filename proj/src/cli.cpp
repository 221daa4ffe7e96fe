#include "ia_arena/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "ia_arena/config.hpp"
#include "ia_arena/harness.hpp"
#include "ia_arena/nn/gradcheck.hpp"

namespace ia_arena {
namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kSubcommands = {"simulate", "train", "evaluate", "compare",
                                               "gradcheck"};

std::string describe(const std::string& sub) {
  if (sub == "simulate") return "Run a heuristic allocator (greedy or linucb)";
  if (sub == "train") return "Train ddpg or iagru, evaluate, write a checkpoint";
  if (sub == "evaluate") return "Evaluate a checkpoint without training";
  if (sub == "compare") return "Run all four allocators on one config";
  return "Finite-difference check of the nn operators";
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  int seeds = 1;
  std::string checkpoint;
  int instances = 100;
};

class CliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig resolve_config(const CommonArgs& args) {
  if (args.config_path.empty()) throw CliError("--config is required");
  std::ifstream in(args.config_path);
  if (!in) throw CliError("config file not found: " + args.config_path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw CliError("malformed config " + args.config_path + ": " + e.what());
  }
  try {
    for (const auto& o : args.overrides) apply_override(doc, o);
    return config_from_json(doc);
  } catch (const std::invalid_argument& e) {
    throw CliError("invalid config " + args.config_path + ": " + e.what());
  }
}

std::uint64_t seed_for(const ExperimentConfig& config, int k) {
  return k == 0 ? config.seed : derive_seed(config.seed, "seed", static_cast<std::uint64_t>(k));
}

std::string suffix_for(int k, int seeds) {
  return seeds > 1 ? "_seed" + std::to_string(k) : "";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError("cannot write " + path.string());
  out << content;
}

// Runs `allocator` over every derived seed, writing one metrics CSV (and,
// for learning allocators, one checkpoint) per seed.
SummaryRow run_allocator(const ExperimentConfig& base, AllocatorKind allocator,
                         const CommonArgs& args, const RunOptions& options,
                         const std::string& tag, std::ostream& out) {
  std::vector<double> rewards;
  for (int k = 0; k < args.seeds; ++k) {
    ExperimentConfig config = base;
    config.allocator = allocator;
    config.seed = seed_for(base, k);
    ExperimentResult result = run_experiment(config, options);
    rewards.push_back(result.mean_eval_reward);
    const std::string stem = std::string(to_string(allocator)) + tag + suffix_for(k, args.seeds);
    std::ostringstream csv;
    write_metrics_csv(csv, result.rows);
    write_file(fs::path(args.out_dir) / ("metrics_" + stem + ".csv"), csv.str());
    if (!result.checkpoint.empty() && options.train) {
      write_file(fs::path(args.out_dir) / ("checkpoint_" + stem + ".txt"), result.checkpoint);
    }
    out << to_string(allocator) << " seed " << config.seed << ": mean eval reward "
        << format_double(result.mean_eval_reward) << '\n';
  }
  return summarize(base, allocator, rewards);
}

void write_summary(const CommonArgs& args, const std::vector<SummaryRow>& rows) {
  std::ostringstream s;
  write_summary_csv(s, rows);
  write_file(fs::path(args.out_dir) / "summary.csv", s.str());
}

int dispatch(const std::string& command, const CommonArgs& args, std::ostream& out) {
  if (command == "gradcheck") {
    nn::GradCheckOptions options;
    options.instances = args.instances;
    bool ok = true;
    for (const auto& r : nn::run_gradcheck_suite(options)) {
      out << (r.passed ? "PASS " : "FAIL ") << r.name << " max_rel_err="
          << format_double(r.max_relative_error) << " instances=" << r.instances << '\n';
      ok = ok && r.passed;
    }
    return ok ? 0 : 1;
  }

  ExperimentConfig config = resolve_config(args);
  if (args.seeds < 1) throw CliError("--seeds must be at least 1");
  fs::create_directories(args.out_dir);

  if (command == "simulate") {
    if (is_learning(config.allocator)) {
      throw CliError("simulate runs heuristic allocators (greedy, linucb); use train for " +
                     std::string(to_string(config.allocator)));
    }
    write_summary(args, {run_allocator(config, config.allocator, args, {}, "", out)});
    return 0;
  }
  if (command == "train") {
    if (!is_learning(config.allocator)) {
      throw CliError("train needs allocator ddpg or iagru, got " +
                     std::string(to_string(config.allocator)));
    }
    write_summary(args, {run_allocator(config, config.allocator, args, {}, "", out)});
    return 0;
  }
  if (command == "evaluate") {
    if (!is_learning(config.allocator)) throw CliError("evaluate needs allocator ddpg or iagru");
    if (args.checkpoint.empty()) throw CliError("evaluate requires --checkpoint PATH");
    std::ifstream in(args.checkpoint);
    if (!in) throw CliError("checkpoint not found: " + args.checkpoint);
    nn::BlockMap blocks;
    try {
      blocks = nn::read_blocks(in);
    } catch (const std::runtime_error& e) {
      throw CliError("unreadable checkpoint " + args.checkpoint + ": " + e.what());
    }
    RunOptions options;
    options.train = false;
    options.checkpoint = &blocks;
    try {
      write_summary(args, {run_allocator(config, config.allocator, args, options, "_eval", out)});
    } catch (const std::runtime_error& e) {
      throw CliError("checkpoint " + args.checkpoint + " does not fit this config: " + e.what());
    }
    return 0;
  }
  if (command == "compare") {
    std::vector<SummaryRow> rows;
    for (auto kind : {AllocatorKind::Greedy, AllocatorKind::LinUcb, AllocatorKind::Ddpg,
                      AllocatorKind::IaGru}) {
      rows.push_back(run_allocator(config, kind, args, {}, "", out));
    }
    write_summary(args, rows);
    return 0;
  }
  throw CliError("unknown subcommand '" + command + "'");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << "usage: ia_arena {simulate|train|evaluate|compare|gradcheck} [options]\n";
    return 2;
  }
  if (std::find(kSubcommands.begin(), kSubcommands.end(), args[0]) == kSubcommands.end() &&
      args[0] != "--help" && args[0] != "-h") {
    err << "error: unknown subcommand '" << args[0]
        << "' (expected simulate, train, evaluate, compare or gradcheck)\n";
    return 2;
  }

  CLI::App app{"Impression allocation arena: strategic sellers vs. allocation algorithms"};
  app.require_subcommand(1);
  CommonArgs common;
  for (const auto& name : kSubcommands) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    if (name != "gradcheck") {
      sub->add_option("--config", common.config_path, "Experiment config (JSON)")->required();
      sub->add_option("--out", common.out_dir, "Output directory");
      sub->add_option("--set", common.overrides, "Override a config key: KEY=VALUE");
      sub->add_option("--seeds", common.seeds, "Repeat over N derived seeds");
    } else {
      sub->add_option("--instances", common.instances, "Random instances per operator");
    }
    if (name == "evaluate") {
      sub->add_option("--checkpoint", common.checkpoint, "Checkpoint written by train");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    return dispatch(app.get_subcommands().front()->get_name(), common, out);
  } catch (const CliError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ia_arena
