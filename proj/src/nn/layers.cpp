#include "ia_arena/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace ia_arena::nn {

Mat fan_in_uniform(Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

Dense Dense::create(ParamSet& params, const std::string& prefix, Eigen::Index inputs,
                    Eigen::Index outputs, Rng& rng) {
  Dense d;
  d.inputs = inputs;
  d.outputs = outputs;
  d.weight = params.add(prefix + ".W", fan_in_uniform(inputs, outputs, inputs, rng));
  d.bias = params.add(prefix + ".b", fan_in_uniform(1, outputs, inputs, rng));
  return d;
}

Var Dense::apply(std::span<const Var> bound, Var x) const {
  if (x.cols() != inputs) throw std::invalid_argument("dense: input width mismatch");
  return add_bias(matmul(x, bound[weight]), bound[bias]);
}

Var dense_forward(std::span<const Var> bound, const Dense& layer, Var x, bool relu_out) {
  Var y = layer.apply(bound, x);
  return relu_out ? relu(y) : y;
}

Gru Gru::create(ParamSet& params, const std::string& prefix, Eigen::Index inputs,
                Eigen::Index hidden, Rng& rng) {
  Gru g;
  g.inputs = inputs;
  g.hidden = hidden;
  g.wz = params.add(prefix + ".Wz", fan_in_uniform(inputs, hidden, inputs, rng));
  g.wr = params.add(prefix + ".Wr", fan_in_uniform(inputs, hidden, inputs, rng));
  g.wh = params.add(prefix + ".Wh", fan_in_uniform(inputs, hidden, inputs, rng));
  g.uz = params.add(prefix + ".Uz", fan_in_uniform(hidden, hidden, hidden, rng));
  g.ur = params.add(prefix + ".Ur", fan_in_uniform(hidden, hidden, hidden, rng));
  g.uh = params.add(prefix + ".Uh", fan_in_uniform(hidden, hidden, hidden, rng));
  g.bz = params.add(prefix + ".bz", fan_in_uniform(1, hidden, hidden, rng));
  g.br = params.add(prefix + ".br", fan_in_uniform(1, hidden, hidden, rng));
  g.bh = params.add(prefix + ".bh", fan_in_uniform(1, hidden, hidden, rng));
  return g;
}

Var Gru::step(std::span<const Var> bound, Var x, Var h) const {
  if (x.cols() != inputs || h.cols() != hidden || x.rows() != h.rows()) {
    throw std::invalid_argument("gru: input or hidden shape mismatch");
  }
  Var z = sigmoid(add_bias(add(matmul(x, bound[wz]), matmul(h, bound[uz])), bound[bz]));
  Var r = sigmoid(add_bias(add(matmul(x, bound[wr]), matmul(h, bound[ur])), bound[br]));
  Var c = tanh(add_bias(add(matmul(x, bound[wh]), matmul(mul(r, h), bound[uh])), bound[bh]));
  return add(mul(affine(z, -1.0, 1.0), h), mul(z, c));
}

Var Gru::first_step(std::span<const Var> bound, Var x) const {
  if (x.cols() != inputs) throw std::invalid_argument("gru: input shape mismatch");
  Var z = sigmoid(add_bias(matmul(x, bound[wz]), bound[bz]));
  Var c = tanh(add_bias(matmul(x, bound[wh]), bound[bh]));
  return mul(z, c);
}

Var gru_forward_from_zero(std::span<const Var> bound, const Gru& cell,
                          std::span<const Var> sequence) {
  if (sequence.empty()) throw std::invalid_argument("gru_forward_from_zero needs one input");
  Var h = cell.first_step(bound, sequence.front());
  for (const Var& x : sequence.subspan(1)) h = cell.step(bound, x, h);
  return h;
}

Var gru_forward(std::span<const Var> bound, const Gru& cell, std::span<const Var> sequence,
                Var h0) {
  Var h = h0;
  for (const Var& x : sequence) h = cell.step(bound, x, h);
  return h;
}

}  // namespace ia_arena::nn
