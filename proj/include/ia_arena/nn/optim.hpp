#pragma once

#include <vector>

#include "ia_arena/nn/tape.hpp"

namespace ia_arena::nn {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<Mat> first_moment;
  std::vector<Mat> second_moment;
  long step = 0;

  AdamState() = default;
  AdamState(const ParamSet& params, AdamConfig config);
};

// One bias-corrected Adam step using the gradients stored in `params`.
// Throws on non-finite gradients before touching anything.
void adam_step(ParamSet& params, AdamState& state);

// target <- tau * online + (1 - tau) * target
void soft_update(ParamSet& target, const ParamSet& online, double tau);

}  // namespace ia_arena::nn
