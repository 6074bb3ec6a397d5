#pragma once

#include "amatch/bound_params.hpp"
#include "amatch/types.hpp"

namespace amatch {

// S = Ys W Yt^T (n x m).
Matrix bilinear_similarity(const Matrix& y_source, const Matrix& y_target, const Matrix& w);

// Dot products of L2-normalized rows.
Matrix cosine_similarity(const Matrix& y_source, const Matrix& y_target);

// (n+1) x (m+1): S with a final row and column filled with z.
Matrix augment_dustbin(const Matrix& scores, double z);

// Log-domain Sinkhorn against row marginals (1,...,1,m) and column marginals
// (1,...,1,n). Each iteration normalizes columns, then rows, so the real rows
// of the result sum to 1 after any number of iterations. Returns the
// (n+1) x (m+1) log transport plan.
template <class Real>
ad::Var sinkhorn_log(ad::Tape<Real>& tape, ad::Var scores_aug, int iters);

// Transport plan exp(sinkhorn_log(...)) evaluated without gradients.
Matrix sinkhorn(const Matrix& scores_aug, int iters);

// Similarity between the model outputs under the configured metric.
template <class Real>
ad::Var similarity(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound, ad::Var y_source,
                   ad::Var y_target);

// Pairs (i, j) that are the strict maximum of row i and of column j of the
// augmented plan (dustbin entries included) with plan(i, j) >= threshold.
// Sorted by source index.
Correspondences extract_matches(const Matrix& plan, double threshold);

}  // namespace amatch
