#include "ia_arena/nn/tape.hpp"

#include <stdexcept>

namespace ia_arena::nn {

const Mat& Var::value() const {
  if (!tape_) throw std::logic_error("use of an unbound Var");
  return tape_->value(id_);
}

Mat Var::grad() const {
  if (!tape_) throw std::logic_error("use of an unbound Var");
  const auto& node = tape_->nodes_.at(id_);
  if (!node.has_grad) return Mat::Zero(node.value.rows(), node.value.cols());
  return node.grad;
}

// -- ParamSet ----------------------------------------------------------------

int ParamSet::add(std::string name, Mat value) {
  if (find(name) >= 0) throw std::invalid_argument("duplicate parameter block '" + name + "'");
  Mat grad = Mat::Zero(value.rows(), value.cols());
  blocks_.push_back({std::move(name), std::move(value), std::move(grad)});
  return size() - 1;
}

int ParamSet::find(std::string_view name) const {
  for (int i = 0; i < size(); ++i) {
    if (blocks_[i].name == name) return i;
  }
  return -1;
}

void ParamSet::zero_grad() {
  for (auto& b : blocks_) b.grad.setZero();
}

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += static_cast<std::size_t>(b.value.size());
  return n;
}

bool ParamSet::same_shapes(const ParamSet& other) const {
  if (other.size() != size()) return false;
  for (int i = 0; i < size(); ++i) {
    const auto& a = blocks_[i].value;
    const auto& b = other.blocks_[i].value;
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  }
  return true;
}

std::vector<Var> ParamSet::bind(Tape& tape, bool track_grad) {
  std::vector<Var> vars;
  vars.reserve(blocks_.size());
  for (int i = 0; i < size(); ++i) vars.push_back(tape.param(*this, i, track_grad));
  return vars;
}

std::vector<Var> ParamSet::bind_frozen(Tape& tape) const {
  std::vector<Var> vars;
  vars.reserve(blocks_.size());
  for (const auto& b : blocks_) vars.push_back(tape.constant(b.value));
  return vars;
}

// -- Tape --------------------------------------------------------------------

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::check_owned(Var v) const {
  if (v.tape_ != this || v.id_ < 0 || v.id_ >= static_cast<int>(nodes_.size())) {
    throw std::logic_error("Var does not belong to this tape");
  }
}

Var Tape::constant(Mat value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::variable(Mat value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  return push(std::move(n));
}

Var Tape::param(ParamSet& set, int block, bool track_grad) {
  Node n;
  n.value = set.block(block).value;
  n.requires_grad = track_grad;
  if (track_grad) {
    n.sink = &set;
    n.sink_block = block;
  }
  return push(std::move(n));
}

Var Tape::record(Mat value, std::initializer_list<Var> inputs, BackwardFn backward) {
  return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(backward));
}

Var Tape::record(Mat value, std::span<const Var> inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (const Var& v : inputs) {
    check_owned(v);
    n.requires_grad = n.requires_grad || nodes_[v.id_].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

Mat& Tape::grad(int id) {
  Node& n = nodes_.at(id);
  if (!n.has_grad) {
    n.grad = Mat::Zero(n.value.rows(), n.value.cols());
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::backward(Var output) {
  if (nodes_.empty() || !output.valid()) {
    throw std::logic_error("backward called before any forward pass was recorded");
  }
  check_owned(output);
  if (output.rows() != 1 || output.cols() != 1) {
    throw std::invalid_argument("backward needs a scalar (1x1) output");
  }
  for (auto& n : nodes_) n.has_grad = false;
  grad(output.id_)(0, 0) = 1.0;
  for (int id = output.id_; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || !n.has_grad) continue;
    if (n.backward) n.backward(*this, id);
  }
  for (auto& n : nodes_) {
    if (n.sink && n.has_grad) n.sink->block(n.sink_block).grad += n.grad;
  }
}

void Tape::clear() { nodes_.clear(); }

// -- operators ---------------------------------------------------------------

namespace {

Tape& tape_of(Var a) {
  if (!a.valid()) throw std::logic_error("operator applied to an unbound Var");
  return *a.tape();
}

void require_same_shape(Var a, Var b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
  }
}

void accumulate(Tape& t, Var v, const Mat& g) {
  if (t.requires_grad(v.id())) t.grad(v.id()) += g;
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a);
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  Mat out = a.value() * b.value();
  return t.record(std::move(out), {a, b}, [a, b](Tape& t, int self) {
    const Mat& g = t.grad(self);
    if (t.requires_grad(a.id())) t.grad(a.id()).noalias() += g * t.value(b.id()).transpose();
    if (t.requires_grad(b.id())) t.grad(b.id()).noalias() += t.value(a.id()).transpose() * g;
  });
}

Var add_bias(Var x, Var bias) {
  Tape& t = tape_of(x);
  if (bias.rows() != 1 || bias.cols() != x.cols()) {
    throw std::invalid_argument("add_bias: bias must be 1 x cols(x)");
  }
  Mat out = x.value().rowwise() + bias.value().row(0);
  return t.record(std::move(out), {x, bias}, [x, bias](Tape& t, int self) {
    const Mat& g = t.grad(self);
    accumulate(t, x, g);
    if (t.requires_grad(bias.id())) t.grad(bias.id()) += g.colwise().sum();
  });
}

Var add(Var a, Var b) {
  require_same_shape(a, b, "add");
  Tape& t = tape_of(a);
  return t.record(a.value() + b.value(), {a, b}, [a, b](Tape& t, int self) {
    const Mat& g = t.grad(self);
    accumulate(t, a, g);
    accumulate(t, b, g);
  });
}

Var sub(Var a, Var b) {
  require_same_shape(a, b, "sub");
  Tape& t = tape_of(a);
  return t.record(a.value() - b.value(), {a, b}, [a, b](Tape& t, int self) {
    const Mat& g = t.grad(self);
    accumulate(t, a, g);
    if (t.requires_grad(b.id())) t.grad(b.id()) -= g;
  });
}

Var mul(Var a, Var b) {
  require_same_shape(a, b, "mul");
  Tape& t = tape_of(a);
  Mat out = a.value().cwiseProduct(b.value());
  return t.record(std::move(out), {a, b}, [a, b](Tape& t, int self) {
    const Mat& g = t.grad(self);
    if (t.requires_grad(a.id())) t.grad(a.id()) += g.cwiseProduct(t.value(b.id()));
    if (t.requires_grad(b.id())) t.grad(b.id()) += g.cwiseProduct(t.value(a.id()));
  });
}

Var affine(Var x, double scale, double shift) {
  Tape& t = tape_of(x);
  Mat out = (x.value().array() * scale + shift).matrix();
  return t.record(std::move(out), {x}, [x, scale](Tape& t, int self) {
    accumulate(t, x, t.grad(self) * scale);
  });
}

Var relu(Var x) {
  Tape& t = tape_of(x);
  Mat out = x.value().cwiseMax(0.0);
  return t.record(std::move(out), {x}, [x](Tape& t, int self) {
    const Mat& in = t.value(x.id());
    accumulate(t, x, (in.array() > 0.0).select(t.grad(self).array(), 0.0).matrix());
  });
}

Var sigmoid(Var x) {
  Tape& t = tape_of(x);
  Mat out = (1.0 / (1.0 + (-x.value().array()).exp())).matrix();
  return t.record(std::move(out), {x}, [x](Tape& t, int self) {
    const auto y = t.value(self).array();
    accumulate(t, x, (t.grad(self).array() * y * (1.0 - y)).matrix());
  });
}

Var tanh(Var x) {
  Tape& t = tape_of(x);
  Mat out = x.value().array().tanh().matrix();
  return t.record(std::move(out), {x}, [x](Tape& t, int self) {
    const auto y = t.value(self).array();
    accumulate(t, x, (t.grad(self).array() * (1.0 - y * y)).matrix());
  });
}

Var square(Var x) {
  Tape& t = tape_of(x);
  Mat out = x.value().array().square().matrix();
  return t.record(std::move(out), {x}, [x](Tape& t, int self) {
    accumulate(t, x, (2.0 * t.grad(self).array() * t.value(x.id()).array()).matrix());
  });
}

Mat softmax_rows(const Mat& logits) {
  Mat out = logits.colwise() - logits.rowwise().maxCoeff();
  out = out.array().exp().matrix();
  const Eigen::VectorXd totals = out.rowwise().sum();
  for (Eigen::Index r = 0; r < out.rows(); ++r) out.row(r) /= totals(r);
  return out;
}

Var softmax_rows(Var x) {
  Tape& t = tape_of(x);
  return t.record(softmax_rows(x.value()), {x}, [x](Tape& t, int self) {
    const Mat& y = t.value(self);
    const Mat& g = t.grad(self);
    const Eigen::VectorXd dot = g.cwiseProduct(y).rowwise().sum();
    Mat dx = g.colwise() - dot;
    accumulate(t, x, dx.cwiseProduct(y));
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols of nothing");
  Tape& t = tape_of(parts.front());
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) throw std::invalid_argument("concat_cols: row counts differ");
    cols += p.cols();
  }
  Mat out(rows, cols);
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return t.record(std::move(out), parts, [inputs](Tape& t, int self) {
    Eigen::Index at = 0;
    for (const Var& p : inputs) {
      const Eigen::Index c = t.value(p.id()).cols();
      if (t.requires_grad(p.id())) t.grad(p.id()) += t.grad(self).middleCols(at, c);
      at += c;
    }
  });
}

Var repeat_rows(Var x, Eigen::Index k) {
  if (k < 1) throw std::invalid_argument("repeat_rows: k must be positive");
  Tape& t = tape_of(x);
  const Mat& in = x.value();
  Mat out(in.rows() * k, in.cols());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    out.middleRows(r * k, k).rowwise() = in.row(r);
  }
  return t.record(std::move(out), {x}, [x, k](Tape& t, int self) {
    if (!t.requires_grad(x.id())) return;
    const Mat& g = t.grad(self);
    Mat& dx = t.grad(x.id());
    for (Eigen::Index r = 0; r < dx.rows(); ++r) {
      dx.row(r) += g.middleRows(r * k, k).colwise().sum();
    }
  });
}

Var reshape(Var x, Eigen::Index rows, Eigen::Index cols) {
  Tape& t = tape_of(x);
  if (rows * cols != x.value().size()) throw std::invalid_argument("reshape: size mismatch");
  Mat out = Eigen::Map<const Mat>(x.value().data(), rows, cols);
  return t.record(std::move(out), {x}, [x](Tape& t, int self) {
    if (!t.requires_grad(x.id())) return;
    Mat& dx = t.grad(x.id());
    const Mat& g = t.grad(self);
    dx += Eigen::Map<const Mat>(g.data(), dx.rows(), dx.cols());
  });
}

Var sum(Var x) {
  Tape& t = tape_of(x);
  Mat out(1, 1);
  out(0, 0) = x.value().sum();
  return t.record(std::move(out), {x}, [x](Tape& t, int self) {
    if (t.requires_grad(x.id())) t.grad(x.id()).array() += t.grad(self)(0, 0);
  });
}

Var mean(Var x) {
  const double n = static_cast<double>(x.value().size());
  return affine(sum(x), 1.0 / n, 0.0);
}

Var sum_rows(Var x) {
  Tape& t = tape_of(x);
  Mat out = x.value().rowwise().sum();
  return t.record(std::move(out), {x}, [x](Tape& t, int self) {
    if (!t.requires_grad(x.id())) return;
    t.grad(x.id()).colwise() += t.grad(self).col(0);
  });
}

}  // namespace ia_arena::nn
