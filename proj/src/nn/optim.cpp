#include "ia_arena/nn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace ia_arena::nn {

AdamState::AdamState(const ParamSet& params, AdamConfig cfg) : config(cfg) {
  for (const auto& b : params.blocks()) {
    first_moment.push_back(Mat::Zero(b.value.rows(), b.value.cols()));
    second_moment.push_back(Mat::Zero(b.value.rows(), b.value.cols()));
  }
}

void adam_step(ParamSet& params, AdamState& state) {
  if (state.first_moment.size() != static_cast<std::size_t>(params.size())) {
    throw std::invalid_argument("adam state does not match parameter set");
  }
  for (const auto& b : params.blocks()) {
    if (!b.grad.allFinite()) {
      throw std::domain_error("non-finite gradient in block '" + b.name + "'");
    }
  }
  const AdamConfig& c = state.config;
  state.step += 1;
  const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (int i = 0; i < params.size(); ++i) {
    ParamBlock& b = params.block(i);
    Mat& m = state.first_moment[i];
    Mat& v = state.second_moment[i];
    m = c.beta1 * m + (1.0 - c.beta1) * b.grad;
    v = c.beta2 * v + (1.0 - c.beta2) * b.grad.cwiseAbs2();
    b.value.array() -= c.learning_rate * (m.array() / correction1) /
                       ((v.array() / correction2).sqrt() + c.epsilon);
  }
}

void soft_update(ParamSet& target, const ParamSet& online, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("soft_update tau must lie in (0, 1]");
  if (!target.same_shapes(online)) throw std::invalid_argument("soft_update: shape mismatch");
  for (int i = 0; i < target.size(); ++i) {
    Mat& t = target.block(i).value;
    if (tau == 1.0) {
      t = online.block(i).value;
    } else {
      t = tau * online.block(i).value + (1.0 - tau) * t;
    }
  }
}

}  // namespace ia_arena::nn
