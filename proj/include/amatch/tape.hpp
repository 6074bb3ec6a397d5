#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "amatch/types.hpp"

namespace amatch::ad {

// Handle to a value recorded on a Tape.
struct Var {
  std::int32_t id = -1;
  bool valid() const { return id >= 0; }
  friend bool operator==(Var, Var) = default;
};

enum class OpKind : std::uint8_t {
  kConstant,
  kParameter,
  kMatmul,
  kMatmulTransposed,
  kLinear,
  kAdd,
  kSub,
  kHadamard,
  kScale,
  kAddRow,
  kAddCol,
  kRelu,
  kGelu,
  kExp,
  kSoftmaxRows,
  kLayerNorm,
  kLogSumExpRows,
  kLogSumExpCols,
  kGatherRows,
  kSliceCols,
  kConcatCols,
  kAppendDustbin,
  kNormalizeRows,
  kPick,
  kClampMin,
  kSum,
  kBceWithLogits,
};

inline constexpr double kLayerNormEps = 1e-5;

template <class Real>
class Gradients;

// Reverse-mode record of dense matrix primitives.
//
// Nodes are appended in evaluation order, so operands always precede their
// consumers and backward() can replay the record in reverse. A tape built
// with record=false evaluates values only and keeps no backward rules.
template <class Real>
class Tape {
 public:
  using Mat = MatrixT<Real>;

  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  Var constant(Mat value);
  Var parameter(Mat value);

  const Mat& value(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)).value; }
  OpKind kind(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)).kind; }
  bool requires_grad(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)).requires_grad; }
  std::size_t size() const { return nodes_.size(); }
  bool recording() const { return record_; }

  // Shapes of every recorded node of the given kind, in recording order.
  std::vector<std::pair<Index, Index>> shapes_of(OpKind kind) const;

  Var matmul(Var a, Var b);
  Var matmul_transposed(Var a, Var b);  // a * b^T
  Var linear(Var x, Var weight, std::optional<Var> bias = std::nullopt);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var hadamard(Var a, Var b);
  Var scale(Var a, Real s);
  Var add_row(Var m, Var row);  // m (p x q) + row (1 x q) broadcast down
  Var add_col(Var m, Var col);  // m (p x q) + col (p x 1) broadcast across
  Var relu(Var a);
  Var gelu(Var a);  // tanh approximation
  Var exp(Var a);
  Var softmax_rows(Var a);
  Var layer_norm(Var a, Var gain, Var bias);
  Var logsumexp_rows(Var a);  // p x 1
  Var logsumexp_cols(Var a);  // 1 x q
  Var gather_rows(Var a, std::span<const Index> rows);
  Var slice_cols(Var a, Index start, Index count);
  Var concat_cols(std::span<const Var> parts);
  Var append_dustbin(Var scores, Var z);  // (p+1) x (q+1), new row/col filled with z
  Var normalize_rows(Var a);              // rows scaled to unit L2 norm
  Var pick(Var a, std::span<const std::pair<Index, Index>> entries);  // N x 1
  Var clamp_min(Var a, Real lo);
  Var sum(Var a);  // 1 x 1
  // Mean binary cross-entropy of sigmoid(logits) against 0/1 labels; 1 x 1.
  Var bce_with_logits(Var logits, std::span<const double> labels);

  // Gradient of a 1 x 1 node with respect to every node on the tape.
  Gradients<Real> backward(Var loss) const;

 private:
  using Backward = std::function<void(const Tape&, std::vector<Mat>&, const Mat&)>;

  struct Node {
    Mat value;
    OpKind kind;
    bool requires_grad = false;
    Backward backward;
  };

  Var push(Mat value, OpKind kind, std::initializer_list<Var> operands, Backward backward);
  const Node& node(Var v) const { return nodes_[static_cast<std::size_t>(v.id)]; }

  std::vector<Node> nodes_;
  bool record_;
};

template <class Real>
class Gradients {
 public:
  using Mat = MatrixT<Real>;

  Gradients(std::vector<Mat> grads, std::vector<std::pair<Index, Index>> shapes)
      : grads_(std::move(grads)), shapes_(std::move(shapes)) {}

  // Zero matrix of the node's shape when nothing flowed into it.
  Mat of(Var v) const {
    const auto& g = grads_.at(static_cast<std::size_t>(v.id));
    if (g.size() == 0) {
      const auto& [r, c] = shapes_.at(static_cast<std::size_t>(v.id));
      return Mat::Zero(r, c);
    }
    return g;
  }

 private:
  std::vector<Mat> grads_;
  std::vector<std::pair<Index, Index>> shapes_;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace amatch::ad
