// Python view of the simulator: market arithmetic, the two heuristic
// allocators, whole experiments driven by a JSON config, and the CLI.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ia_arena/baselines.hpp"
#include "ia_arena/cli.hpp"
#include "ia_arena/config.hpp"
#include "ia_arena/harness.hpp"
#include "ia_arena/market.hpp"
#include "ia_arena/nn/gradcheck.hpp"

namespace py = pybind11;
using namespace ia_arena;

namespace {

ExperimentConfig parse(const std::string& json_text) {
  return config_from_json(Json::parse(json_text));
}

MarketState state_from(const std::vector<double>& prices, const std::vector<double>& impressions) {
  if (prices.size() != impressions.size()) throw std::invalid_argument("prices and impressions differ in length");
  std::vector<SellerRecord> recs(prices.size());
  for (std::size_t i = 0; i < prices.size(); ++i) {
    const double n = (1.0 - prices[i]) * impressions[i];
    recs[i] = {impressions[i], prices[i], n, prices[i] * n};
  }
  return MarketState(1, static_cast<int>(prices.size())).advanced(recs);
}

py::dict result_dict(const ExperimentResult& r) {
  py::list rows;
  for (const auto& row : r.rows) {
    py::dict d;
    d["episode"] = row.episode;
    d["step"] = row.step;
    d["reward"] = row.reward;
    d["critic_loss"] = row.critic_loss ? py::cast(*row.critic_loss) : py::none();
    rows.append(d);
  }
  py::dict out;
  out["rows"] = rows;
  out["mean_eval_reward"] = r.mean_eval_reward;
  out["groups"] = r.groups;
  out["allocation_mass"] = r.allocation_mass;
  out["checkpoint"] = r.checkpoint;
  return out;
}

}  // namespace

PYBIND11_MODULE(ia_arena, m) {
  m.doc() = "Impression allocation marketplace simulator";

  m.def("seller_payoff", &seller_payoff, py::arg("price"), py::arg("impressions"), py::arg("cost"));
  m.def("purchase_probability", &purchase_probability, py::arg("price"), py::arg("impressions"));

  m.def(
      "market_step",
      [](const std::vector<double>& prices, const std::vector<double>& allocation,
         const std::vector<double>& costs) {
        auto r = market_step(MarketState(1, static_cast<int>(prices.size())), prices,
                             Allocation(allocation), costs);
        std::vector<double> revenue;
        for (const auto& rec : r.records) revenue.push_back(rec.revenue);
        return py::make_tuple(r.reward, r.payoffs, revenue);
      },
      py::arg("prices"), py::arg("allocation"), py::arg("costs"),
      "One market round from an empty window; returns (reward, payoffs, revenues).");

  m.def(
      "greedy_allocation",
      [](const std::vector<double>& prices, const std::vector<double>& impressions) {
        auto q = greedy_myopic(state_from(prices, impressions));
        return std::vector<double>(q.values().begin(), q.values().end());
      },
      py::arg("last_prices"), py::arg("last_impressions"));

  m.def(
      "linucb_choice",
      [](const std::vector<double>& prices, const std::vector<double>& impressions, double alpha) {
        const auto state = state_from(prices, impressions);
        LinUcbState s(state.sellers(), alpha);
        return linucb_choose(s, latest_features(state)).arm;
      },
      py::arg("last_prices"), py::arg("last_impressions"), py::arg("alpha") = 1.0,
      "Arm picked by fresh LinUCB models.");

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const auto c = parse(config_json);
        py::gil_scoped_release release;
        auto r = run_experiment(c);
        py::gil_scoped_acquire acquire;
        return result_dict(r);
      },
      py::arg("config_json"));

  m.def(
      "scale_and_solve",
      [](const std::string& config_json) {
        const auto c = parse(config_json);
        py::gil_scoped_release release;
        auto r = scale_and_solve(c);
        py::gil_scoped_acquire acquire;
        return result_dict(r);
      },
      py::arg("config_json"));

  m.def(
      "config_hash", [](const std::string& config_json) { return config_hash(parse(config_json)); },
      py::arg("config_json"));

  m.def(
      "gradcheck",
      [](int instances) {
        nn::GradCheckOptions o;
        o.instances = instances;
        std::vector<std::tuple<std::string, double, bool>> out;
        for (const auto& r : nn::run_gradcheck_suite(o)) {
          out.emplace_back(r.name, r.max_relative_error, r.passed);
        }
        return out;
      },
      py::arg("instances") = 10);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a CLI subcommand; returns (exit code, stdout, stderr).");
}
