#include "amatch/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "amatch/error.hpp"
#include "amatch/op_counter.hpp"

namespace amatch {

template <class Real>
std::vector<Candidate> nn_ratio_scores(const MatrixT<Real>& fs, const MatrixT<Real>& ft, bool mutual_only) {
  ScopedStage stage(Stage::kAnchorSelect);
  require(ft.rows() >= 2, ErrorKind::kTooFewTargets,
          "ratio test needs at least 2 target points, got " + std::to_string(ft.rows()));
  require(fs.cols() == ft.cols(), ErrorKind::kShapeMismatch, "source and target feature widths differ");
  require(fs.allFinite() && ft.allFinite(), ErrorKind::kNonFiniteValue, "ratio test received non-finite features");

  // Squared distances through the Gram matrix: |a|^2 + |b|^2 - 2 a.b
  OpCounter::local().add(static_cast<std::int64_t>(fs.rows()) * fs.cols() * ft.rows());
  MatrixT<Real> d2;
  d2.noalias() = fs * ft.transpose();
  d2 *= Real(-2);
  d2.colwise() += fs.rowwise().squaredNorm();
  d2.rowwise() += ft.rowwise().squaredNorm().transpose();

  std::vector<Candidate> out;
  out.reserve(static_cast<std::size_t>(fs.rows()));
  for (Index i = 0; i < fs.rows(); ++i) {
    Index best = -1;
    Real first = std::numeric_limits<Real>::infinity();
    Real second = std::numeric_limits<Real>::infinity();
    for (Index j = 0; j < ft.rows(); ++j) {
      const Real d = std::max(d2(i, j), Real(0));
      if (d < first) {
        second = first;
        first = d;
        best = j;
      } else if (d < second) {
        second = d;
      }
    }
    const double d1 = std::sqrt(static_cast<double>(first));
    const double dn = std::sqrt(static_cast<double>(second));
    const double ratio = dn > 0.0 ? d1 / dn : 1.0;
    out.push_back({i, best, ratio});
  }

  if (mutual_only) {
    std::vector<Index> back(static_cast<std::size_t>(ft.rows()), -1);
    for (Index j = 0; j < ft.rows(); ++j) {
      Index best = -1;
      Real first = std::numeric_limits<Real>::infinity();
      for (Index i = 0; i < fs.rows(); ++i) {
        const Real d = std::max(d2(i, j), Real(0));
        if (d < first) {
          first = d;
          best = i;
        }
      }
      back[static_cast<std::size_t>(j)] = best;
    }
    std::erase_if(out, [&](const Candidate& c) { return back[static_cast<std::size_t>(c.target)] != c.source; });
  }
  return out;
}

template <class Real>
AnchorPairs select_anchors(std::span<const Candidate> candidates, Index k, const MatrixT<Real>& fs,
                           const MatrixT<Real>& ft) {
  require(k >= 1, ErrorKind::kInvalidArgument, "anchor count k must be >= 1, got " + std::to_string(k));
  require(!candidates.empty(), ErrorKind::kNoCandidates, "no anchor candidates");

  std::vector<Candidate> sorted(candidates.begin(), candidates.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const Candidate& a, const Candidate& b) {
    if (a.ratio != b.ratio) return a.ratio < b.ratio;
    return a.source < b.source;
  });

  AnchorPairs pairs;
  pairs.requested_k = k;
  std::unordered_set<Index> used_targets;
  std::unordered_set<Index> used_sources;
  for (const auto& c : sorted) {
    if (static_cast<Index>(pairs.source_indices.size()) == k) break;
    require(c.source >= 0 && c.source < fs.rows() && c.target >= 0 && c.target < ft.rows(),
            ErrorKind::kIndexOutOfBounds, "candidate index outside feature sets");
    if (used_targets.contains(c.target) || used_sources.contains(c.source)) continue;
    used_targets.insert(c.target);
    used_sources.insert(c.source);
    pairs.source_indices.push_back(c.source);
    pairs.target_indices.push_back(c.target);
    pairs.ratios.push_back(c.ratio);
  }
  pairs.clamped = pairs.k() < k;

  pairs.anchors_source.resize(pairs.k(), fs.cols());
  pairs.anchors_target.resize(pairs.k(), ft.cols());
  for (Index a = 0; a < pairs.k(); ++a) {
    pairs.anchors_source.row(a) = fs.row(pairs.source_indices[static_cast<std::size_t>(a)]).template cast<double>();
    pairs.anchors_target.row(a) = ft.row(pairs.target_indices[static_cast<std::size_t>(a)]).template cast<double>();
  }
  return pairs;
}

template std::vector<Candidate> nn_ratio_scores<float>(const MatrixF&, const MatrixF&, bool);
template std::vector<Candidate> nn_ratio_scores<double>(const Matrix&, const Matrix&, bool);
template AnchorPairs select_anchors<float>(std::span<const Candidate>, Index, const MatrixF&, const MatrixF&);
template AnchorPairs select_anchors<double>(std::span<const Candidate>, Index, const Matrix&, const Matrix&);

}  // namespace amatch
