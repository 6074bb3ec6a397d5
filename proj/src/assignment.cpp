#include "amatch/assignment.hpp"

#include <cmath>

#include "amatch/error.hpp"
#include "amatch/op_counter.hpp"

namespace amatch {

Matrix bilinear_similarity(const Matrix& y_source, const Matrix& y_target, const Matrix& w) {
  require(y_source.cols() == w.rows() && y_target.cols() == w.cols() && w.rows() == w.cols(),
          ErrorKind::kShapeMismatch, "bilinear similarity: feature widths do not match W");
  return y_source * w * y_target.transpose();
}

Matrix cosine_similarity(const Matrix& y_source, const Matrix& y_target) {
  require(y_source.cols() == y_target.cols(), ErrorKind::kShapeMismatch, "cosine similarity: widths differ");
  ad::Tape<double> tape(/*record=*/false);
  const ad::Var s = tape.normalize_rows(tape.constant(y_source));
  const ad::Var t = tape.normalize_rows(tape.constant(y_target));
  return tape.value(tape.matmul_transposed(s, t));
}

Matrix augment_dustbin(const Matrix& scores, double z) {
  Matrix out(scores.rows() + 1, scores.cols() + 1);
  out.topLeftCorner(scores.rows(), scores.cols()) = scores;
  out.row(scores.rows()).setConstant(z);
  out.col(scores.cols()).setConstant(z);
  return out;
}

template <class Real>
ad::Var sinkhorn_log(ad::Tape<Real>& tape, ad::Var scores_aug, int iters) {
  require(iters >= 1, ErrorKind::kInvalidArgument, "sinkhorn needs iters >= 1, got " + std::to_string(iters));
  using Mat = MatrixT<Real>;
  const Index rows = tape.value(scores_aug).rows();
  const Index cols = tape.value(scores_aug).cols();
  require(rows >= 2 && cols >= 2, ErrorKind::kShapeMismatch, "sinkhorn expects a dustbin-augmented matrix");
  const Index n = rows - 1;
  const Index m = cols - 1;

  Mat log_a = Mat::Zero(rows, 1);
  log_a(n, 0) = std::log(static_cast<Real>(m));
  Mat log_b = Mat::Zero(1, cols);
  log_b(0, m) = std::log(static_cast<Real>(n));
  const ad::Var la = tape.constant(std::move(log_a));
  const ad::Var lb = tape.constant(std::move(log_b));

  ad::Var u = tape.constant(Mat::Zero(rows, 1));
  ad::Var v;
  for (int it = 0; it < iters; ++it) {
    v = tape.sub(lb, tape.logsumexp_cols(tape.add_col(scores_aug, u)));
    u = tape.sub(la, tape.logsumexp_rows(tape.add_row(scores_aug, v)));
  }
  return tape.add_col(tape.add_row(scores_aug, v), u);
}

Matrix sinkhorn(const Matrix& scores_aug, int iters) {
  ad::Tape<double> tape(/*record=*/false);
  return tape.value(sinkhorn_log(tape, tape.constant(scores_aug), iters)).array().exp();
}

template <class Real>
ad::Var similarity(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound, ad::Var y_source,
                   ad::Var y_target) {
  ScopedStage stage(Stage::kAssignment);
  if (params.config.metric == Metric::kCosine) {
    return tape.matmul_transposed(tape.normalize_rows(y_source), tape.normalize_rows(y_target));
  }
  return tape.matmul_transposed(tape.matmul(y_source, bound[params.layout.metric]), y_target);
}

Correspondences extract_matches(const Matrix& plan, double threshold) {
  require(plan.rows() >= 1 && plan.cols() >= 1, ErrorKind::kShapeMismatch, "empty plan");
  const Index n = plan.rows() - 1;
  const Index m = plan.cols() - 1;

  // Position of the unique maximum, or -1 when the maximum is shared.
  auto strict_argmax = [](const auto& vec) {
    Index best = 0;
    bool unique = true;
    for (Index j = 1; j < vec.size(); ++j) {
      if (vec(j) > vec(best)) {
        best = j;
        unique = true;
      } else if (vec(j) == vec(best)) {
        unique = false;
      }
    }
    return unique ? best : Index{-1};
  };

  std::vector<Index> col_best(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) col_best[static_cast<std::size_t>(j)] = strict_argmax(plan.col(j));

  Correspondences out;
  for (Index i = 0; i < n; ++i) {
    const Index j = strict_argmax(plan.row(i));
    if (j < 0 || j >= m) continue;
    if (col_best[static_cast<std::size_t>(j)] != i) continue;
    if (plan(i, j) < threshold) continue;
    out.push_back({i, j, plan(i, j)});
  }
  return out;
}

template ad::Var sinkhorn_log<float>(ad::Tape<float>&, ad::Var, int);
template ad::Var sinkhorn_log<double>(ad::Tape<double>&, ad::Var, int);
template ad::Var similarity<float>(ad::Tape<float>&, const ModelParams&, const BoundParams&, ad::Var, ad::Var);
template ad::Var similarity<double>(ad::Tape<double>&, const ModelParams&, const BoundParams&, ad::Var, ad::Var);

}  // namespace amatch
