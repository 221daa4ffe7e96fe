#include "ia_arena/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "ia_arena/nn/layers.hpp"
#include "ia_arena/random.hpp"

namespace ia_arena::nn {
namespace {

double evaluate(ParamSet& params, const LossBuilder& loss) {
  Tape tape;
  auto bound = params.bind(tape, false);
  return loss(tape, bound).value()(0, 0);
}

Mat random_mat(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  // Kept away from zero so ReLU kinks sit far outside the difference step.
  std::uniform_real_distribution<double> mag(0.1, 1.0);
  std::bernoulli_distribution sign(0.5);
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = sign(rng) ? mag(rng) : -mag(rng);
  return m;
}

// Contracts an op output with a fixed random probe to get a scalar loss.
Var probe(Tape& tape, Var out, const Mat& weights) {
  return sum(mul(out, tape.constant(weights)));
}

struct Case {
  std::string name;
  // Fills params and returns the loss builder for one random instance.
  std::function<LossBuilder(ParamSet&, Rng&)> make;
};

Eigen::Index dim(Rng& rng, int lo = 1, int hi = 4) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <class Op>
Case unary(std::string name, Op op) {
  return {name, [op](ParamSet& p, Rng& rng) -> LossBuilder {
            const Eigen::Index r = dim(rng), c = dim(rng);
            p.add("x", random_mat(r, c, rng));
            Mat w = random_mat(r, c, rng);
            return [op, w](Tape& t, std::span<const Var> b) { return probe(t, op(b[0]), w); };
          }};
}

template <class Op>
Case binary(std::string name, Op op) {
  return {name, [op](ParamSet& p, Rng& rng) -> LossBuilder {
            const Eigen::Index r = dim(rng), c = dim(rng);
            p.add("a", random_mat(r, c, rng));
            p.add("b", random_mat(r, c, rng));
            Mat w = random_mat(r, c, rng);
            return [op, w](Tape& t, std::span<const Var> b) { return probe(t, op(b[0], b[1]), w); };
          }};
}

std::vector<Case> cases() {
  std::vector<Case> all;
  all.push_back({"matmul", [](ParamSet& p, Rng& rng) -> LossBuilder {
                   const Eigen::Index r = dim(rng), k = dim(rng), c = dim(rng);
                   p.add("a", random_mat(r, k, rng));
                   p.add("b", random_mat(k, c, rng));
                   Mat w = random_mat(r, c, rng);
                   return [w](Tape& t, std::span<const Var> b) {
                     return probe(t, matmul(b[0], b[1]), w);
                   };
                 }});
  all.push_back({"add_bias", [](ParamSet& p, Rng& rng) -> LossBuilder {
                   const Eigen::Index r = dim(rng), c = dim(rng);
                   p.add("x", random_mat(r, c, rng));
                   p.add("bias", random_mat(1, c, rng));
                   Mat w = random_mat(r, c, rng);
                   return [w](Tape& t, std::span<const Var> b) {
                     return probe(t, add_bias(b[0], b[1]), w);
                   };
                 }});
  all.push_back(binary("add", [](Var a, Var b) { return add(a, b); }));
  all.push_back(binary("sub", [](Var a, Var b) { return sub(a, b); }));
  all.push_back(binary("mul", [](Var a, Var b) { return mul(a, b); }));
  all.push_back(unary("affine", [](Var x) { return affine(x, -1.7, 0.3); }));
  all.push_back(unary("relu", [](Var x) { return relu(x); }));
  all.push_back(unary("sigmoid", [](Var x) { return sigmoid(x); }));
  all.push_back(unary("tanh", [](Var x) { return tanh(x); }));
  all.push_back(unary("square", [](Var x) { return square(x); }));
  all.push_back(unary("softmax_rows", [](Var x) { return softmax_rows(x); }));
  all.push_back({"sum_rows", [](ParamSet& p, Rng& rng) -> LossBuilder {
                   const Eigen::Index r = dim(rng), c = dim(rng);
                   p.add("x", random_mat(r, c, rng));
                   Mat w = random_mat(r, 1, rng);
                   return [w](Tape& t, std::span<const Var> b) {
                     return probe(t, sum_rows(b[0]), w);
                   };
                 }});
  all.push_back({"concat_cols", [](ParamSet& p, Rng& rng) -> LossBuilder {
                   const Eigen::Index r = dim(rng), c1 = dim(rng), c2 = dim(rng);
                   p.add("a", random_mat(r, c1, rng));
                   p.add("b", random_mat(r, c2, rng));
                   Mat w = random_mat(r, c1 + c2, rng);
                   return [w](Tape& t, std::span<const Var> b) {
                     return probe(t, concat_cols(b.first(2)), w);
                   };
                 }});
  all.push_back({"repeat_rows", [](ParamSet& p, Rng& rng) -> LossBuilder {
                   const Eigen::Index r = dim(rng), c = dim(rng), k = dim(rng);
                   p.add("x", random_mat(r, c, rng));
                   Mat w = random_mat(r * k, c, rng);
                   return [w, k](Tape& t, std::span<const Var> b) {
                     return probe(t, repeat_rows(b[0], k), w);
                   };
                 }});
  all.push_back({"reshape", [](ParamSet& p, Rng& rng) -> LossBuilder {
                   const Eigen::Index r = dim(rng), c = dim(rng);
                   p.add("x", random_mat(r, c, rng));
                   Mat w = random_mat(c, r, rng);
                   return [w, r, c](Tape& t, std::span<const Var> b) {
                     return probe(t, reshape(b[0], c, r), w);
                   };
                 }});
  all.push_back({"sum", [](ParamSet& p, Rng& rng) -> LossBuilder {
                   p.add("x", random_mat(dim(rng), dim(rng), rng));
                   return [](Tape&, std::span<const Var> b) { return sum(b[0]); };
                 }});
  all.push_back({"mean", [](ParamSet& p, Rng& rng) -> LossBuilder {
                   p.add("x", random_mat(dim(rng), dim(rng), rng));
                   return [](Tape&, std::span<const Var> b) {
                     return mean(square(affine(b[0], 1.0, 0.0)));
                   };
                 }});
  all.push_back({"dense_relu_2layer", [](ParamSet& p, Rng& rng) -> LossBuilder {
                   const Eigen::Index in = dim(rng, 2, 3), hidden = dim(rng, 3, 5),
                                      out = dim(rng, 1, 3), batch = dim(rng, 1, 3);
                   Dense l1 = Dense::create(p, "l1", in, hidden, rng);
                   Dense l2 = Dense::create(p, "l2", hidden, out, rng);
                   Mat x = random_mat(batch, in, rng);
                   Mat w = random_mat(batch, out, rng);
                   return [=](Tape& t, std::span<const Var> b) {
                     Var h = dense_forward(b, l1, t.constant(x), true);
                     return probe(t, dense_forward(b, l2, h, false), w);
                   };
                 }});
  all.push_back({"gru_through_time", [](ParamSet& p, Rng& rng) -> LossBuilder {
                   const Eigen::Index in = 2, hidden = 3, batch = dim(rng, 1, 2);
                   Gru cell = Gru::create(p, "gru", in, hidden, rng);
                   std::vector<Mat> xs;
                   for (int s = 0; s < 3; ++s) xs.push_back(random_mat(batch, in, rng));
                   Mat h0 = random_mat(batch, hidden, rng);
                   Mat w = random_mat(batch, hidden, rng);
                   return [=](Tape& t, std::span<const Var> b) {
                     std::vector<Var> seq;
                     for (const Mat& x : xs) seq.push_back(t.constant(x));
                     return probe(t, gru_forward(b, cell, seq, t.constant(h0)), w);
                   };
                 }});
  return all;
}

}  // namespace

double max_relative_error(ParamSet& params, const LossBuilder& loss, double step) {
  params.zero_grad();
  {
    Tape tape;
    auto bound = params.bind(tape, true);
    tape.backward(loss(tape, bound));
  }
  double worst = 0.0;
  for (auto& block : params.blocks()) {
    for (Eigen::Index i = 0; i < block.value.size(); ++i) {
      double& x = block.value.data()[i];
      const double saved = x;
      x = saved + step;
      const double up = evaluate(params, loss);
      x = saved - step;
      const double down = evaluate(params, loss);
      x = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = block.grad.data()[i];
      const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      worst = std::max(worst, std::abs(analytic - numeric) / scale);
    }
  }
  return worst;
}

std::vector<GradCheckResult> run_gradcheck_suite(const GradCheckOptions& options) {
  std::vector<GradCheckResult> results;
  std::uint64_t case_index = 0;
  for (const Case& c : cases()) {
    GradCheckResult r{c.name, options.instances, 0.0, true};
    for (int k = 0; k < options.instances; ++k) {
      Rng rng = make_stream(options.seed, "gradcheck",
                            case_index * 1000003ULL + static_cast<std::uint64_t>(k));
      ParamSet params;
      LossBuilder loss = c.make(params, rng);
      r.max_relative_error = std::max(r.max_relative_error,
                                      max_relative_error(params, loss, options.step));
    }
    r.passed = r.max_relative_error < options.tolerance;
    results.push_back(r);
    ++case_index;
  }
  return results;
}

}  // namespace ia_arena::nn
