#include "amatch/losses.hpp"

#include <algorithm>
#include <cmath>

#include "amatch/error.hpp"

namespace amatch {

std::vector<std::pair<Index, Index>> loss_entries(const GroundTruth& gt, Index n, Index m) {
  std::vector<std::pair<Index, Index>> entries;
  entries.reserve(gt.matches.size() + gt.unmatched_source.size() + gt.unmatched_target.size());
  auto check = [](Index idx, Index bound, const char* what) {
    if (idx < 0 || idx >= bound) {
      throw Error(ErrorKind::kIndexOutOfBounds,
                  std::string(what) + " index " + std::to_string(idx) + " outside [0," + std::to_string(bound) + ")");
    }
  };
  for (const auto& [i, j] : gt.matches) {
    check(i, n, "source");
    check(j, m, "target");
    entries.emplace_back(i, j);
  }
  for (Index i : gt.unmatched_source) {
    check(i, n, "source");
    entries.emplace_back(i, m);
  }
  for (Index j : gt.unmatched_target) {
    check(j, m, "target");
    entries.emplace_back(n, j);
  }
  return entries;
}

template <class Real>
ad::Var matching_loss(ad::Tape<Real>& tape, ad::Var log_plan, const GroundTruth& gt) {
  const auto& P = tape.value(log_plan);
  const auto entries = loss_entries(gt, P.rows() - 1, P.cols() - 1);
  const ad::Var picked = tape.clamp_min(tape.pick(log_plan, entries), static_cast<Real>(std::log(kPlanFloor)));
  return tape.scale(tape.sum(picked), Real(-1));
}

double matching_loss(const Matrix& plan, const GroundTruth& gt) {
  double total = 0.0;
  for (const auto& [i, j] : loss_entries(gt, plan.rows() - 1, plan.cols() - 1)) {
    total -= std::log(std::max(plan(i, j), kPlanFloor));
  }
  return total;
}

std::vector<double> anchor_labels(const AnchorPairs& anchors, const GroundTruth& gt, const MatchProblem& problem,
                                  LabelMode mode, double tau) {
  std::vector<double> labels(static_cast<std::size_t>(anchors.k()), 0.0);
  if (mode == LabelMode::kReprojection) {
    require(gt.warp.has_value(), ErrorKind::kInvalidArgument, "reprojection labels need a known warp");
    require(tau > 0.0, ErrorKind::kInvalidArgument, "reprojection threshold must be positive");
  }
  for (Index a = 0; a < anchors.k(); ++a) {
    const Index i = anchors.source_indices[static_cast<std::size_t>(a)];
    const Index j = anchors.target_indices[static_cast<std::size_t>(a)];
    bool positive = false;
    if (mode == LabelMode::kMembership) {
      positive = gt.contains(i, j);
    } else {
      const Point2 p = gt.warp->apply(problem.source.keypoints.positions.at(static_cast<std::size_t>(i)));
      const Point2 q = problem.target.keypoints.positions.at(static_cast<std::size_t>(j));
      positive = std::hypot(p.x - q.x, p.y - q.y) < tau;
    }
    labels[static_cast<std::size_t>(a)] = positive ? 1.0 : 0.0;
  }
  return labels;
}

template <class Real>
ad::Var anchor_unit_loss(ad::Tape<Real>& tape, ad::Var logits, std::span<const double> labels) {
  return tape.bce_with_logits(logits, labels);
}

double anchor_unit_loss(std::span<const double> logits, std::span<const double> labels) {
  ad::Tape<double> tape(/*record=*/false);
  Matrix x(static_cast<Index>(logits.size()), 1);
  std::copy(logits.begin(), logits.end(), x.data());
  return tape.value(tape.bce_with_logits(tape.constant(std::move(x)), labels))(0, 0);
}

template <class Real>
ad::Var total_loss(ad::Tape<Real>& tape, ad::Var matching, std::span<const ad::Var> unit_losses, double alpha) {
  require(!unit_losses.empty(), ErrorKind::kLengthMismatch, "total loss needs at least one unit loss");
  ad::Var acc = unit_losses.front();
  for (std::size_t r = 1; r < unit_losses.size(); ++r) acc = tape.add(acc, unit_losses[r]);
  return tape.add(matching, tape.scale(acc, static_cast<Real>(alpha)));
}

double total_loss(double matching, std::span<const double> unit_losses, double alpha) {
  require(!unit_losses.empty(), ErrorKind::kLengthMismatch, "total loss needs at least one unit loss");
  double acc = 0.0;
  for (double l : unit_losses) acc += l;
  return matching + alpha * acc;
}

template ad::Var matching_loss<float>(ad::Tape<float>&, ad::Var, const GroundTruth&);
template ad::Var matching_loss<double>(ad::Tape<double>&, ad::Var, const GroundTruth&);
template ad::Var anchor_unit_loss<float>(ad::Tape<float>&, ad::Var, std::span<const double>);
template ad::Var anchor_unit_loss<double>(ad::Tape<double>&, ad::Var, std::span<const double>);
template ad::Var total_loss<float>(ad::Tape<float>&, ad::Var, std::span<const ad::Var>, double);
template ad::Var total_loss<double>(ad::Tape<double>&, ad::Var, std::span<const ad::Var>, double);

}  // namespace amatch
