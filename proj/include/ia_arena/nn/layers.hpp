#pragma once

#include <span>
#include <string>

#include "ia_arena/nn/tape.hpp"
#include "ia_arena/random.hpp"

namespace ia_arena::nn {

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
Mat fan_in_uniform(Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in, Rng& rng);

// Affine map x W + b on row-batched inputs. The layer only remembers block
// indices, so copying the owning ParamSet copies the layer's weights.
struct Dense {
  int weight = -1;
  int bias = -1;
  Eigen::Index inputs = 0;
  Eigen::Index outputs = 0;

  static Dense create(ParamSet& params, const std::string& prefix, Eigen::Index inputs,
                      Eigen::Index outputs, Rng& rng);
  Var apply(std::span<const Var> bound, Var x) const;
};

Var dense_forward(std::span<const Var> bound, const Dense& layer, Var x, bool relu_out);

// Gated recurrent unit, reset gate applied to h before the candidate matmul:
//   z = sigmoid(x Wz + h Uz + bz)
//   r = sigmoid(x Wr + h Ur + br)
//   c = tanh(x Wh + (r*h) Uh + bh)
//   h' = (1 - z) * h + z * c
struct Gru {
  int wz = -1, wr = -1, wh = -1;
  int uz = -1, ur = -1, uh = -1;
  int bz = -1, br = -1, bh = -1;
  Eigen::Index inputs = 0;
  Eigen::Index hidden = 0;

  static Gru create(ParamSet& params, const std::string& prefix, Eigen::Index inputs,
                    Eigen::Index hidden, Rng& rng);
  Var step(std::span<const Var> bound, Var x, Var h) const;
  // step() with h = 0, where every recurrent term vanishes: h' = z * c.
  Var first_step(std::span<const Var> bound, Var x) const;
};

// Consumes the sequence left to right; an empty sequence returns h0.
Var gru_forward(std::span<const Var> bound, const Gru& cell, std::span<const Var> sequence,
                Var h0);
// Same, starting from the all-zero hidden state (rows taken from the inputs).
Var gru_forward_from_zero(std::span<const Var> bound, const Gru& cell,
                          std::span<const Var> sequence);

}  // namespace ia_arena::nn
