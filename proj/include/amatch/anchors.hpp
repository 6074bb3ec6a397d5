#pragma once

#include <span>
#include <vector>

#include "amatch/types.hpp"

namespace amatch {

// Nearest target for one source point, scored by the ratio test.
struct Candidate {
  Index source = 0;
  Index target = 0;
  double ratio = 1.0;  // d1 / d2 in [0, 1]; lower is more reliable
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// One candidate per source row: nearest and second-nearest target by
// Euclidean distance, ties going to the lower target index. With
// mutual_only, candidates whose target does not pick the same source back are
// dropped. Throws TooFewTargets when ft has fewer than two rows.
template <class Real>
std::vector<Candidate> nn_ratio_scores(const MatrixT<Real>& fs, const MatrixT<Real>& ft, bool mutual_only = false);

// Greedy top-k by (ratio, source) with one-to-one targets; gathers A^s, A^t.
// k is clamped (and flagged) when fewer candidates survive deduplication.
template <class Real>
AnchorPairs select_anchors(std::span<const Candidate> candidates, Index k, const MatrixT<Real>& fs,
                           const MatrixT<Real>& ft);

}  // namespace amatch
