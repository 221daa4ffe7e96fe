#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ia_arena/nn/tape.hpp"

namespace ia_arena::nn {

using LossBuilder = std::function<Var(Tape&, std::span<const Var> bound)>;

// Largest elementwise |analytic - numeric| / max(|analytic|, |numeric|, 1e-6)
// over every parameter of `params`, using central differences.
double max_relative_error(ParamSet& params, const LossBuilder& loss, double step = 1e-5);

struct GradCheckOptions {
  int instances = 100;
  std::uint64_t seed = 1;
  double step = 1e-5;
  double tolerance = 1e-4;
};

struct GradCheckResult {
  std::string name;
  int instances = 0;
  double max_relative_error = 0.0;
  bool passed = false;
};

// Every tape operator plus a two-layer ReLU net and a GRU unrolled over
// three steps, each on randomly sized and valued instances.
std::vector<GradCheckResult> run_gradcheck_suite(const GradCheckOptions& options = {});

}  // namespace ia_arena::nn
