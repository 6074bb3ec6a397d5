#include "amatch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "amatch/error.hpp"

namespace amatch {

std::int64_t correct_count(const Correspondences& pred, const GroundTruth& gt) {
  const std::set<std::pair<Index, Index>> truth(gt.matches.begin(), gt.matches.end());
  std::set<std::pair<Index, Index>> hit;
  for (const auto& p : pred) {
    if (truth.contains({p.source, p.target})) hit.insert({p.source, p.target});
  }
  return static_cast<std::int64_t>(hit.size());
}

PrecisionResult precision(const Correspondences& pred, const GroundTruth& gt) {
  if (pred.empty()) return {0.0, true};
  return {static_cast<double>(correct_count(pred, gt)) / static_cast<double>(pred.size()), false};
}

double recall(const Correspondences& pred, const GroundTruth& gt) {
  require(!gt.matches.empty(), ErrorKind::kEmptyGroundTruth, "recall is undefined without ground-truth matches");
  return static_cast<double>(correct_count(pred, gt)) / static_cast<double>(gt.matches.size());
}

double matching_score(const Correspondences& pred, const GroundTruth& gt, Index n, Index m) {
  require(n + m > 0, ErrorKind::kEmptySide, "matching score needs at least one feature point");
  return static_cast<double>(correct_count(pred, gt)) / (0.5 * static_cast<double>(n + m));
}

Correspondences nn_baseline(const MatchProblem& problem) {
  const Matrix& a = problem.source.descriptors.values;
  const Matrix& b = problem.target.descriptors.values;
  require(a.cols() == b.cols(), ErrorKind::kShapeMismatch, "descriptor widths differ");
  Matrix d2 = -2.0 * a * b.transpose();
  d2.colwise() += a.rowwise().squaredNorm();
  d2.rowwise() += b.rowwise().squaredNorm().transpose();

  Correspondences out;
  if (a.rows() == 0 || b.rows() == 0) return out;
  std::vector<Index> col_best(static_cast<std::size_t>(b.rows()));
  for (Index j = 0; j < b.rows(); ++j) {
    Index best = 0;
    d2.col(j).minCoeff(&best);
    col_best[static_cast<std::size_t>(j)] = best;
  }
  for (Index i = 0; i < a.rows(); ++i) {
    Index j = 0;
    const double d = d2.row(i).minCoeff(&j);
    if (col_best[static_cast<std::size_t>(j)] == i) {
      out.push_back({i, j, 1.0 / (1.0 + std::sqrt(std::max(d, 0.0)))});
    }
  }
  return out;
}

EvalReport evaluate(const Correspondences& pred, const GroundTruth& gt, Index n, Index m) {
  EvalReport r;
  const auto p = precision(pred, gt);
  r.precision = p.value;
  r.empty_pred = p.empty;
  r.recall = gt.matches.empty() ? 0.0 : recall(pred, gt);
  r.matching_score = matching_score(pred, gt, n, m);
  r.num_pred = static_cast<std::int64_t>(pred.size());
  r.num_gt = static_cast<std::int64_t>(gt.matches.size());
  return r;
}

EvalReport aggregate(const std::vector<EvalReport>& reports) {
  EvalReport out;
  if (reports.empty()) return out;
  out.empty_pred = true;
  for (const auto& r : reports) {
    out.precision += r.precision;
    out.recall += r.recall;
    out.matching_score += r.matching_score;
    out.num_pred += r.num_pred;
    out.num_gt += r.num_gt;
    out.empty_pred = out.empty_pred && r.empty_pred;
  }
  const double count = static_cast<double>(reports.size());
  out.precision /= count;
  out.recall /= count;
  out.matching_score /= count;
  return out;
}

void to_json(nlohmann::json& j, const EvalReport& r) {
  j = nlohmann::json{{"precision", r.precision}, {"recall", r.recall}, {"matching_score", r.matching_score},
                     {"num_pred", r.num_pred},   {"num_gt", r.num_gt}};
}

}  // namespace amatch
