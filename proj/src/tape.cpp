#include "amatch/tape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "amatch/error.hpp"
#include "amatch/op_counter.hpp"

namespace amatch::ad {
namespace {

template <class Mat>
std::string shape_str(const Mat& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

template <class Mat>
void check_same_shape(const Mat& a, const Mat& b, const char* op) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::kShapeMismatch,
          std::string(op) + ": " + shape_str(a) + " vs " + shape_str(b));
}

// Adds expr into the gradient slot of v, allocating on first touch.
template <class Real, class Expr>
void accumulate(std::vector<MatrixT<Real>>& grads, Var v, const Expr& expr) {
  auto& slot = grads[static_cast<std::size_t>(v.id)];
  if (slot.size() == 0) {
    slot = expr;
  } else {
    slot += expr;
  }
}

void count_macs(Index p, Index q, Index r) { OpCounter::local().add(static_cast<std::int64_t>(p) * q * r); }

}  // namespace

template <class Real>
Var Tape<Real>::push(Mat value, OpKind kind, std::initializer_list<Var> operands, Backward backward) {
  Node n;
  n.value = std::move(value);
  n.kind = kind;
  if (record_) {
    for (Var v : operands) n.requires_grad = n.requires_grad || node(v).requires_grad;
    if (n.requires_grad) n.backward = std::move(backward);
  }
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

template <class Real>
std::vector<std::pair<Index, Index>> Tape<Real>::shapes_of(OpKind k) const {
  std::vector<std::pair<Index, Index>> out;
  for (const auto& n : nodes_) {
    if (n.kind == k) out.emplace_back(n.value.rows(), n.value.cols());
  }
  return out;
}

template <class Real>
Var Tape<Real>::constant(Mat value) {
  return push(std::move(value), OpKind::kConstant, {}, nullptr);
}

template <class Real>
Var Tape<Real>::parameter(Mat value) {
  Node n;
  n.value = std::move(value);
  n.kind = OpKind::kParameter;
  n.requires_grad = record_;
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

template <class Real>
Var Tape<Real>::matmul(Var a, Var b) {
  const Mat& A = value(a);
  const Mat& B = value(b);
  require(A.cols() == B.rows(), ErrorKind::kShapeMismatch,
          "matmul: " + shape_str(A) + " * " + shape_str(B));
  count_macs(A.rows(), A.cols(), B.cols());
  Mat C;
  C.noalias() = A * B;
  return push(std::move(C), OpKind::kMatmul, {a, b}, [a, b](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
    if (t.requires_grad(a)) accumulate<Real>(g, a, gout * t.value(b).transpose());
    if (t.requires_grad(b)) accumulate<Real>(g, b, t.value(a).transpose() * gout);
  });
}

template <class Real>
Var Tape<Real>::matmul_transposed(Var a, Var b) {
  const Mat& A = value(a);
  const Mat& B = value(b);
  require(A.cols() == B.cols(), ErrorKind::kShapeMismatch,
          "matmul_transposed: " + shape_str(A) + " * (" + shape_str(B) + ")^T");
  count_macs(A.rows(), A.cols(), B.rows());
  Mat C;
  C.noalias() = A * B.transpose();
  return push(std::move(C), OpKind::kMatmulTransposed, {a, b},
              [a, b](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
                if (t.requires_grad(a)) accumulate<Real>(g, a, gout * t.value(b));
                if (t.requires_grad(b)) accumulate<Real>(g, b, gout.transpose() * t.value(a));
              });
}

template <class Real>
Var Tape<Real>::linear(Var x, Var weight, std::optional<Var> bias) {
  const Mat& X = value(x);
  const Mat& W = value(weight);
  require(X.cols() == W.rows(), ErrorKind::kShapeMismatch,
          "linear: input " + shape_str(X) + " weight " + shape_str(W));
  count_macs(X.rows(), X.cols(), W.cols());
  Mat Y;
  Y.noalias() = X * W;
  if (bias) {
    const Mat& b = value(*bias);
    require(b.rows() == 1 && b.cols() == W.cols(), ErrorKind::kShapeMismatch,
            "linear: bias " + shape_str(b) + " for weight " + shape_str(W));
    Y.rowwise() += b.row(0);
  }
  auto backward = [x, weight, bias](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
    if (t.requires_grad(x)) accumulate<Real>(g, x, gout * t.value(weight).transpose());
    if (t.requires_grad(weight)) accumulate<Real>(g, weight, t.value(x).transpose() * gout);
    if (bias && t.requires_grad(*bias)) accumulate<Real>(g, *bias, gout.colwise().sum());
  };
  if (bias) return push(std::move(Y), OpKind::kLinear, {x, weight, *bias}, backward);
  return push(std::move(Y), OpKind::kLinear, {x, weight}, backward);
}

template <class Real>
Var Tape<Real>::add(Var a, Var b) {
  check_same_shape(value(a), value(b), "add");
  Mat C = value(a) + value(b);
  return push(std::move(C), OpKind::kAdd, {a, b}, [a, b](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
    if (t.requires_grad(a)) accumulate<Real>(g, a, gout);
    if (t.requires_grad(b)) accumulate<Real>(g, b, gout);
  });
}

template <class Real>
Var Tape<Real>::sub(Var a, Var b) {
  check_same_shape(value(a), value(b), "sub");
  Mat C = value(a) - value(b);
  return push(std::move(C), OpKind::kSub, {a, b}, [a, b](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
    if (t.requires_grad(a)) accumulate<Real>(g, a, gout);
    if (t.requires_grad(b)) accumulate<Real>(g, b, -gout);
  });
}

template <class Real>
Var Tape<Real>::hadamard(Var a, Var b) {
  check_same_shape(value(a), value(b), "hadamard");
  Mat C = value(a).cwiseProduct(value(b));
  return push(std::move(C), OpKind::kHadamard, {a, b},
              [a, b](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
                if (t.requires_grad(a)) accumulate<Real>(g, a, gout.cwiseProduct(t.value(b)));
                if (t.requires_grad(b)) accumulate<Real>(g, b, gout.cwiseProduct(t.value(a)));
              });
}

template <class Real>
Var Tape<Real>::scale(Var a, Real s) {
  Mat C = value(a) * s;
  return push(std::move(C), OpKind::kScale, {a}, [a, s](const Tape&, std::vector<Mat>& g, const Mat& gout) {
    accumulate<Real>(g, a, gout * s);
  });
}

template <class Real>
Var Tape<Real>::add_row(Var m, Var row) {
  const Mat& M = value(m);
  const Mat& R = value(row);
  require(R.rows() == 1 && R.cols() == M.cols(), ErrorKind::kShapeMismatch,
          "add_row: " + shape_str(M) + " + " + shape_str(R));
  Mat C = M;
  C.rowwise() += R.row(0);
  return push(std::move(C), OpKind::kAddRow, {m, row},
              [m, row](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
                if (t.requires_grad(m)) accumulate<Real>(g, m, gout);
                if (t.requires_grad(row)) accumulate<Real>(g, row, gout.colwise().sum());
              });
}

template <class Real>
Var Tape<Real>::add_col(Var m, Var col) {
  const Mat& M = value(m);
  const Mat& K = value(col);
  require(K.cols() == 1 && K.rows() == M.rows(), ErrorKind::kShapeMismatch,
          "add_col: " + shape_str(M) + " + " + shape_str(K));
  Mat C = M;
  C.colwise() += K.col(0);
  return push(std::move(C), OpKind::kAddCol, {m, col},
              [m, col](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
                if (t.requires_grad(m)) accumulate<Real>(g, m, gout);
                if (t.requires_grad(col)) accumulate<Real>(g, col, gout.rowwise().sum());
              });
}

template <class Real>
Var Tape<Real>::relu(Var a) {
  Mat C = value(a).cwiseMax(Real(0));
  return push(std::move(C), OpKind::kRelu, {a}, [a](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
    const Mat& x = t.value(a);
    accumulate<Real>(g, a, (x.array() > Real(0)).select(gout, Real(0)));
  });
}

template <class Real>
Var Tape<Real>::gelu(Var a) {
  constexpr Real kC = Real(0.7978845608028654);  // sqrt(2/pi)
  constexpr Real kA = Real(0.044715);
  const Mat& X = value(a);
  Mat C = X.unaryExpr([](Real x) { return Real(0.5) * x * (Real(1) + std::tanh(kC * (x + kA * x * x * x))); });
  return push(std::move(C), OpKind::kGelu, {a}, [a](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
    Mat d = t.value(a).unaryExpr([](Real x) {
      const Real th = std::tanh(kC * (x + kA * x * x * x));
      return Real(0.5) * (Real(1) + th) +
             Real(0.5) * x * (Real(1) - th * th) * kC * (Real(1) + Real(3) * kA * x * x);
    });
    accumulate<Real>(g, a, gout.cwiseProduct(d));
  });
}

template <class Real>
Var Tape<Real>::exp(Var a) {
  Mat C = value(a).array().exp().matrix();
  Var out = push(std::move(C), OpKind::kExp, {a}, nullptr);
  if (nodes_.back().requires_grad) {
    nodes_.back().backward = [a, out](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
      accumulate<Real>(g, a, gout.cwiseProduct(t.value(out)));
    };
  }
  return out;
}

template <class Real>
Var Tape<Real>::softmax_rows(Var a) {
  const Mat& X = value(a);
  Mat Y(X.rows(), X.cols());
  for (Index i = 0; i < X.rows(); ++i) {
    const Real mx = X.row(i).maxCoeff();
    Y.row(i) = (X.row(i).array() - mx).exp().matrix();
    Y.row(i) /= Y.row(i).sum();
  }
  Var out = push(std::move(Y), OpKind::kSoftmaxRows, {a}, nullptr);
  if (nodes_.back().requires_grad) {
    nodes_.back().backward = [a, out](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
      const Mat& y = t.value(out);
      const auto dots = gout.cwiseProduct(y).rowwise().sum();
      Mat dx = y.cwiseProduct(gout);
      dx -= y.cwiseProduct(dots.replicate(1, y.cols()));
      accumulate<Real>(g, a, dx);
    };
  }
  return out;
}

template <class Real>
Var Tape<Real>::layer_norm(Var a, Var gain, Var bias) {
  const Mat& X = value(a);
  const Index c = X.cols();
  require(c >= 2, ErrorKind::kDegenerateWidth, "layer_norm needs width >= 2, got " + std::to_string(c));
  const Mat& G = value(gain);
  const Mat& B = value(bias);
  require(G.rows() == 1 && G.cols() == c && B.rows() == 1 && B.cols() == c, ErrorKind::kShapeMismatch,
          "layer_norm: gain " + shape_str(G) + " bias " + shape_str(B) + " for width " + std::to_string(c));
  Mat xhat(X.rows(), c);
  Mat rstd(X.rows(), 1);
  for (Index i = 0; i < X.rows(); ++i) {
    const Real mu = X.row(i).mean();
    const auto centered = (X.row(i).array() - mu).eval();
    const Real var = centered.square().mean();
    rstd(i, 0) = Real(1) / std::sqrt(var + Real(kLayerNormEps));
    xhat.row(i) = (centered * rstd(i, 0)).matrix();
  }
  Mat Y = xhat;
  Y.array().rowwise() *= G.row(0).array();
  Y.rowwise() += B.row(0);
  return push(std::move(Y), OpKind::kLayerNorm, {a, gain, bias},
              [a, gain, bias, xhat = std::move(xhat), rstd = std::move(rstd)](const Tape& t, std::vector<Mat>& g,
                                                                            const Mat& gout) {
                if (t.requires_grad(gain)) accumulate<Real>(g, gain, gout.cwiseProduct(xhat).colwise().sum());
                if (t.requires_grad(bias)) accumulate<Real>(g, bias, gout.colwise().sum());
                if (t.requires_grad(a)) {
                  Mat dxhat = gout;
                  dxhat.array().rowwise() *= t.value(gain).row(0).array();
                  const Real inv_c = Real(1) / Real(dxhat.cols());
                  Mat dx(dxhat.rows(), dxhat.cols());
                  for (Index i = 0; i < dxhat.rows(); ++i) {
                    const Real mean_d = dxhat.row(i).sum() * inv_c;
                    const Real mean_dx = dxhat.row(i).dot(xhat.row(i)) * inv_c;
                    dx.row(i) = rstd(i, 0) * (dxhat.row(i).array() - mean_d - xhat.row(i).array() * mean_dx).matrix();
                  }
                  accumulate<Real>(g, a, dx);
                }
              });
}

template <class Real>
Var Tape<Real>::logsumexp_rows(Var a) {
  const Mat& X = value(a);
  Mat Y(X.rows(), 1);
  for (Index i = 0; i < X.rows(); ++i) {
    const Real mx = X.row(i).maxCoeff();
    Y(i, 0) = mx + std::log((X.row(i).array() - mx).exp().sum());
  }
  Var out = push(std::move(Y), OpKind::kLogSumExpRows, {a}, nullptr);
  if (nodes_.back().requires_grad) {
    nodes_.back().backward = [a, out](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
      const Mat& x = t.value(a);
      Mat p = (x.colwise() - t.value(out).col(0)).array().exp().matrix();
      p.array().colwise() *= gout.col(0).array();
      accumulate<Real>(g, a, p);
    };
  }
  return out;
}

template <class Real>
Var Tape<Real>::logsumexp_cols(Var a) {
  const Mat& X = value(a);
  Mat Y(1, X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    const Real mx = X.col(j).maxCoeff();
    Y(0, j) = mx + std::log((X.col(j).array() - mx).exp().sum());
  }
  Var out = push(std::move(Y), OpKind::kLogSumExpCols, {a}, nullptr);
  if (nodes_.back().requires_grad) {
    nodes_.back().backward = [a, out](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
      const Mat& x = t.value(a);
      Mat p = (x.rowwise() - t.value(out).row(0)).array().exp().matrix();
      p.array().rowwise() *= gout.row(0).array();
      accumulate<Real>(g, a, p);
    };
  }
  return out;
}

template <class Real>
Var Tape<Real>::gather_rows(Var a, std::span<const Index> rows) {
  const Mat& X = value(a);
  Mat Y(static_cast<Index>(rows.size()), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= X.rows()) {
      throw Error(ErrorKind::kIndexOutOfBounds,
                  "gather_rows: row " + std::to_string(rows[r]) + " of " + std::to_string(X.rows()));
    }
    Y.row(static_cast<Index>(r)) = X.row(rows[r]);
  }
  std::vector<Index> idx(rows.begin(), rows.end());
  return push(std::move(Y), OpKind::kGatherRows, {a},
              [a, idx = std::move(idx)](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
                const Mat& x = t.value(a);
                Mat dx = Mat::Zero(x.rows(), x.cols());
                for (std::size_t r = 0; r < idx.size(); ++r) dx.row(idx[r]) += gout.row(static_cast<Index>(r));
                accumulate<Real>(g, a, dx);
              });
}

template <class Real>
Var Tape<Real>::slice_cols(Var a, Index start, Index count) {
  const Mat& X = value(a);
  require(start >= 0 && count >= 0 && start + count <= X.cols(), ErrorKind::kShapeMismatch,
          "slice_cols out of range for " + shape_str(X));
  Mat Y = X.middleCols(start, count);
  return push(std::move(Y), OpKind::kSliceCols, {a},
              [a, start, count](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
                const Mat& x = t.value(a);
                Mat dx = Mat::Zero(x.rows(), x.cols());
                dx.middleCols(start, count) = gout;
                accumulate<Real>(g, a, dx);
              });
}

template <class Real>
Var Tape<Real>::concat_cols(std::span<const Var> parts) {
  require(!parts.empty(), ErrorKind::kShapeMismatch, "concat_cols of nothing");
  const Index rows = value(parts[0]).rows();
  Index cols = 0;
  for (Var p : parts) {
    require(value(p).rows() == rows, ErrorKind::kShapeMismatch, "concat_cols: row counts differ");
    cols += value(p).cols();
  }
  Mat Y(rows, cols);
  Index at = 0;
  for (Var p : parts) {
    Y.middleCols(at, value(p).cols()) = value(p);
    at += value(p).cols();
  }
  std::vector<Var> ops(parts.begin(), parts.end());
  Node n;
  n.value = std::move(Y);
  n.kind = OpKind::kConcatCols;
  if (record_) {
    for (Var p : ops) n.requires_grad = n.requires_grad || node(p).requires_grad;
    if (n.requires_grad) {
      n.backward = [ops](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
        Index offset = 0;
        for (Var p : ops) {
          const Index w = t.value(p).cols();
          if (t.requires_grad(p)) accumulate<Real>(g, p, gout.middleCols(offset, w));
          offset += w;
        }
      };
    }
  }
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

template <class Real>
Var Tape<Real>::append_dustbin(Var scores, Var z) {
  const Mat& S = value(scores);
  const Mat& Z = value(z);
  require(Z.rows() == 1 && Z.cols() == 1, ErrorKind::kNotScalar, "dustbin score must be 1x1");
  const Index p = S.rows();
  const Index q = S.cols();
  Mat Y(p + 1, q + 1);
  Y.topLeftCorner(p, q) = S;
  Y.row(p).setConstant(Z(0, 0));
  Y.col(q).setConstant(Z(0, 0));
  return push(std::move(Y), OpKind::kAppendDustbin, {scores, z},
              [scores, z, p, q](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
                if (t.requires_grad(scores)) accumulate<Real>(g, scores, gout.topLeftCorner(p, q));
                if (t.requires_grad(z)) {
                  Mat dz(1, 1);
                  dz(0, 0) = gout.row(p).sum() + gout.col(q).head(p).sum();
                  accumulate<Real>(g, z, dz);
                }
              });
}

template <class Real>
Var Tape<Real>::normalize_rows(Var a) {
  const Mat& X = value(a);
  Mat norms = X.rowwise().norm().cwiseMax(Real(1e-12));
  Mat Y = X;
  Y.array().colwise() /= norms.col(0).array();
  Var out = push(std::move(Y), OpKind::kNormalizeRows, {a}, nullptr);
  if (nodes_.back().requires_grad) {
    nodes_.back().backward = [a, out, norms = std::move(norms)](const Tape& t, std::vector<Mat>& g,
                                                                const Mat& gout) {
      const Mat& y = t.value(out);
      const auto dots = gout.cwiseProduct(y).rowwise().sum().eval();
      Mat dx = gout - y.cwiseProduct(dots.replicate(1, y.cols()));
      dx.array().colwise() /= norms.col(0).array();
      accumulate<Real>(g, a, dx);
    };
  }
  return out;
}

template <class Real>
Var Tape<Real>::pick(Var a, std::span<const std::pair<Index, Index>> entries) {
  const Mat& X = value(a);
  Mat Y(static_cast<Index>(entries.size()), 1);
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto [i, j] = entries[e];
    if (i < 0 || i >= X.rows() || j < 0 || j >= X.cols()) {
      throw Error(ErrorKind::kIndexOutOfBounds,
                  "pick: (" + std::to_string(i) + "," + std::to_string(j) + ") outside " + shape_str(X));
    }
    Y(static_cast<Index>(e), 0) = X(i, j);
  }
  std::vector<std::pair<Index, Index>> idx(entries.begin(), entries.end());
  return push(std::move(Y), OpKind::kPick, {a},
              [a, idx = std::move(idx)](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
                const Mat& x = t.value(a);
                Mat dx = Mat::Zero(x.rows(), x.cols());
                for (std::size_t e = 0; e < idx.size(); ++e) dx(idx[e].first, idx[e].second) += gout(static_cast<Index>(e), 0);
                accumulate<Real>(g, a, dx);
              });
}

template <class Real>
Var Tape<Real>::clamp_min(Var a, Real lo) {
  Mat Y = value(a).cwiseMax(lo);
  return push(std::move(Y), OpKind::kClampMin, {a}, [a, lo](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
    accumulate<Real>(g, a, (t.value(a).array() > lo).select(gout, Real(0)));
  });
}

template <class Real>
Var Tape<Real>::sum(Var a) {
  Mat Y(1, 1);
  Y(0, 0) = value(a).sum();
  return push(std::move(Y), OpKind::kSum, {a}, [a](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
    const Mat& x = t.value(a);
    accumulate<Real>(g, a, Mat::Constant(x.rows(), x.cols(), gout(0, 0)));
  });
}

template <class Real>
Var Tape<Real>::bce_with_logits(Var logits, std::span<const double> labels) {
  const Mat& X = value(logits);
  require(X.size() == static_cast<Index>(labels.size()), ErrorKind::kLengthMismatch,
          "bce_with_logits: " + std::to_string(X.size()) + " logits vs " + std::to_string(labels.size()) + " labels");
  require(X.size() > 0, ErrorKind::kLengthMismatch, "bce_with_logits: empty input");
  Mat Y(1, 1);
  Real total = 0;
  for (Index e = 0; e < X.size(); ++e) {
    const Real x = X.data()[e];
    const Real y = static_cast<Real>(labels[static_cast<std::size_t>(e)]);
    total += std::max(x, Real(0)) - x * y + std::log1p(std::exp(-std::abs(x)));
  }
  Y(0, 0) = total / Real(X.size());
  std::vector<double> lab(labels.begin(), labels.end());
  return push(std::move(Y), OpKind::kBceWithLogits, {logits},
              [logits, lab = std::move(lab)](const Tape& t, std::vector<Mat>& g, const Mat& gout) {
                const Mat& x = t.value(logits);
                Mat dx(x.rows(), x.cols());
                const Real inv = gout(0, 0) / Real(x.size());
                for (Index e = 0; e < x.size(); ++e) {
                  const Real s = Real(1) / (Real(1) + std::exp(-x.data()[e]));
                  dx.data()[e] = (s - static_cast<Real>(lab[static_cast<std::size_t>(e)])) * inv;
                }
                accumulate<Real>(g, logits, dx);
              });
}

template <class Real>
Gradients<Real> Tape<Real>::backward(Var loss) const {
  const Mat& L = value(loss);
  require(L.rows() == 1 && L.cols() == 1, ErrorKind::kNotScalar,
          "backward seed must be 1x1, got " + shape_str(L));
  std::vector<Mat> grads(nodes_.size());
  std::vector<std::pair<Index, Index>> shapes;
  shapes.reserve(nodes_.size());
  for (const auto& n : nodes_) shapes.emplace_back(n.value.rows(), n.value.cols());
  grads[static_cast<std::size_t>(loss.id)] = Mat::Ones(1, 1);
  for (std::int32_t i = loss.id; i >= 0; --i) {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.backward || grads[static_cast<std::size_t>(i)].size() == 0) continue;
    // Operands have lower ids, so rules never write into slot i itself.
    n.backward(*this, grads, grads[static_cast<std::size_t>(i)]);
  }
  return Gradients<Real>(std::move(grads), std::move(shapes));
}

template class Tape<float>;
template class Tape<double>;

}  // namespace amatch::ad
