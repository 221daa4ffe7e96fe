#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace ia_arena::nn {

// Row-major so that a (B*m) x 1 column and a B x m matrix share a layout.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Tape;

// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Mat& value() const;
  // Gradient after Tape::backward (zeros if the node did not receive any).
  Mat grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

struct ParamBlock {
  std::string name;
  Mat value;
  Mat grad;
};

// Named parameter blocks with a gradient of identical shape per block.
class ParamSet {
 public:
  int add(std::string name, Mat value);

  int size() const { return static_cast<int>(blocks_.size()); }
  ParamBlock& block(int i) { return blocks_.at(i); }
  const ParamBlock& block(int i) const { return blocks_.at(i); }
  std::span<ParamBlock> blocks() { return blocks_; }
  std::span<const ParamBlock> blocks() const { return blocks_; }
  // -1 when absent.
  int find(std::string_view name) const;

  void zero_grad();
  std::size_t scalar_count() const;
  bool same_shapes(const ParamSet& other) const;

  // Puts every block on the tape, in block order. With track_grad the
  // blocks' gradients are accumulated by Tape::backward.
  std::vector<Var> bind(Tape& tape, bool track_grad);
  // Constants only; nothing flows back into this set.
  std::vector<Var> bind_frozen(Tape& tape) const;

 private:
  std::vector<ParamBlock> blocks_;
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, int self)>;

  Var constant(Mat value);
  // Leaf whose gradient can be read back with Var::grad.
  Var variable(Mat value);
  Var param(ParamSet& set, int block, bool track_grad);
  // Records an op output. It requires a gradient iff any input does.
  Var record(Mat value, std::initializer_list<Var> inputs, BackwardFn backward);
  Var record(Mat value, std::span<const Var> inputs, BackwardFn backward);

  // Reverse sweep from a 1x1 output. Parameter gradients are added to their
  // ParamSet blocks.
  void backward(Var output);

  const Mat& value(int id) const { return nodes_.at(id).value; }
  // Lazily zero-initialised accumulator.
  Mat& grad(int id);
  bool requires_grad(int id) const { return nodes_.at(id).requires_grad; }
  std::size_t size() const { return nodes_.size(); }
  void clear();

 private:
  friend class Var;
  struct Node {
    Mat value;
    Mat grad;
    bool requires_grad = false;
    bool has_grad = false;
    BackwardFn backward;
    ParamSet* sink = nullptr;
    int sink_block = -1;
  };

  Var push(Node node);
  void check_owned(Var v) const;

  std::vector<Node> nodes_;
};

// -- operators ---------------------------------------------------------------

Var matmul(Var a, Var b);
// Adds a 1 x n row to every row of x.
Var add_bias(Var x, Var bias);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
// scale * x + shift, elementwise.
Var affine(Var x, double scale, double shift);
Var relu(Var x);
Var sigmoid(Var x);
Var tanh(Var x);
Var square(Var x);
Var softmax_rows(Var x);
Var concat_cols(std::span<const Var> parts);
// Row b becomes rows b*k .. b*k+k-1.
Var repeat_rows(Var x, Eigen::Index k);
// Row-major reinterpretation.
Var reshape(Var x, Eigen::Index rows, Eigen::Index cols);
Var sum(Var x);
Var mean(Var x);
// B x n -> B x 1.
Var sum_rows(Var x);

Mat softmax_rows(const Mat& logits);

}  // namespace ia_arena::nn
