#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace amatch {

template <class Real>
using MatrixT = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = MatrixT<double>;
using MatrixF = MatrixT<float>;
using Index = Eigen::Index;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

// Pixel rectangle the keypoints were detected in; drives position normalization.
struct ImageExtent {
  double x0 = 0.0;
  double y0 = 0.0;
  double width = 640.0;
  double height = 480.0;
  friend bool operator==(const ImageExtent&, const ImageExtent&) = default;
};

struct KeypointSet {
  std::vector<Point2> positions;
  std::vector<double> scores;  // detector confidence in [0,1]; 1.0 when not supplied
  ImageExtent extent;

  Index count() const { return static_cast<Index>(positions.size()); }
};

// count x d_in raw descriptors, row i belongs to keypoint i.
struct DescriptorSet {
  Matrix values;
  Index count() const { return values.rows(); }
  Index width() const { return values.cols(); }
};

struct ImageFeatures {
  KeypointSet keypoints;
  DescriptorSet descriptors;
};

struct MatchProblem {
  ImageFeatures source;
  ImageFeatures target;

  Index n() const { return source.keypoints.count(); }
  Index m() const { return target.keypoints.count(); }
};

// 2x3 affine map taking source pixels to target pixels.
struct Affine2 {
  Eigen::Matrix<double, 2, 3> m = (Eigen::Matrix<double, 2, 3>() << 1, 0, 0, 0, 1, 0).finished();

  Point2 apply(const Point2& p) const {
    return {m(0, 0) * p.x + m(0, 1) * p.y + m(0, 2), m(1, 0) * p.x + m(1, 1) * p.y + m(1, 2)};
  }
  double determinant() const { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }
};

struct GroundTruth {
  std::vector<std::pair<Index, Index>> matches;  // T
  std::vector<Index> unmatched_source;           // U^s
  std::vector<Index> unmatched_target;           // U^t
  std::optional<Affine2> warp;                   // known for synthetic problems

  bool contains(Index i, Index j) const;
};

struct AnchorPairs {
  std::vector<Index> source_indices;
  std::vector<Index> target_indices;
  std::vector<double> ratios;
  Matrix anchors_source;  // k x c gathered from F^s
  Matrix anchors_target;  // k x c gathered from F^t
  Index requested_k = 0;
  bool clamped = false;  // fewer than requested_k candidates survived

  Index k() const { return static_cast<Index>(source_indices.size()); }
};

struct Match {
  Index source = 0;
  Index target = 0;
  double confidence = 0.0;
  friend bool operator==(const Match&, const Match&) = default;
};
using Correspondences = std::vector<Match>;

// Throws amatch::Error naming the first violated invariant.
void validate(const MatchProblem& problem);
void validate(const GroundTruth& gt, Index n, Index m);

}  // namespace amatch
