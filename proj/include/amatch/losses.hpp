#pragma once

#include <span>
#include <vector>

#include "amatch/config.hpp"
#include "amatch/tape.hpp"
#include "amatch/types.hpp"

namespace amatch {

inline constexpr double kPlanFloor = 1e-12;

// Entries of the augmented plan read by the matching loss: (i, j) for T,
// (i, m) for U^s and (n, j) for U^t. Throws IndexOutOfBounds.
std::vector<std::pair<Index, Index>> loss_entries(const GroundTruth& gt, Index n, Index m);

// -sum log max(P, 1e-12) over loss_entries, taken from the log plan.
template <class Real>
ad::Var matching_loss(ad::Tape<Real>& tape, ad::Var log_plan, const GroundTruth& gt);

// Same quantity from an exponentiated (n+1) x (m+1) plan.
double matching_loss(const Matrix& plan, const GroundTruth& gt);

// 1 for anchors that are ground-truth pairs (membership) or whose source
// reprojects within tau pixels of the target (reprojection; needs gt.warp).
std::vector<double> anchor_labels(const AnchorPairs& anchors, const GroundTruth& gt, const MatchProblem& problem,
                                  LabelMode mode, double tau);

// Mean binary cross-entropy of sigmoid(logits) against labels.
template <class Real>
ad::Var anchor_unit_loss(ad::Tape<Real>& tape, ad::Var logits, std::span<const double> labels);
double anchor_unit_loss(std::span<const double> logits, std::span<const double> labels);

// L_m + alpha * sum_r L^r.
template <class Real>
ad::Var total_loss(ad::Tape<Real>& tape, ad::Var matching, std::span<const ad::Var> unit_losses, double alpha);
double total_loss(double matching, std::span<const double> unit_losses, double alpha);

}  // namespace amatch
