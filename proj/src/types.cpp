#include "amatch/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "amatch/error.hpp"

namespace amatch {
namespace {

void validate_side(const ImageFeatures& side, const char* name) {
  const Index count = side.keypoints.count();
  const std::string tag(name);
  require(count >= 1, ErrorKind::kEmptySide, tag + " side has no keypoints");
  require(static_cast<Index>(side.keypoints.scores.size()) == count, ErrorKind::kShapeMismatch,
          tag + ": " + std::to_string(side.keypoints.scores.size()) + " scores for " + std::to_string(count) +
              " keypoints");
  require(side.descriptors.count() == count, ErrorKind::kShapeMismatch,
          tag + ": " + std::to_string(side.descriptors.count()) + " descriptor rows for " + std::to_string(count) +
              " keypoints");
  require(side.descriptors.width() >= 1, ErrorKind::kShapeMismatch, tag + ": descriptors have zero width");
  for (Index i = 0; i < count; ++i) {
    const auto& p = side.keypoints.positions[static_cast<std::size_t>(i)];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::kNonFiniteValue, tag + ": keypoint " + std::to_string(i) + " position is not finite");
    }
    const double s = side.keypoints.scores[static_cast<std::size_t>(i)];
    if (!std::isfinite(s)) {
      throw Error(ErrorKind::kNonFiniteValue, tag + ": keypoint " + std::to_string(i) + " score is not finite");
    }
    if (s < 0.0 || s > 1.0) {
      throw Error(ErrorKind::kInvalidArgument,
                  tag + ": keypoint " + std::to_string(i) + " score " + std::to_string(s) + " outside [0,1]");
    }
  }
  for (Index i = 0; i < count; ++i) {
    if (!side.descriptors.values.row(i).allFinite()) {
      throw Error(ErrorKind::kNonFiniteValue, tag + ": descriptor row " + std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace

bool GroundTruth::contains(Index i, Index j) const {
  return std::find(matches.begin(), matches.end(), std::pair<Index, Index>{i, j}) != matches.end();
}

void validate(const MatchProblem& problem) {
  validate_side(problem.source, "source");
  validate_side(problem.target, "target");
  require(problem.source.descriptors.width() == problem.target.descriptors.width(), ErrorKind::kShapeMismatch,
          "descriptor widths differ: source " + std::to_string(problem.source.descriptors.width()) + ", target " +
              std::to_string(problem.target.descriptors.width()));
}

void validate(const GroundTruth& gt, Index n, Index m) {
  std::vector<int> seen_s(static_cast<std::size_t>(n), 0);
  std::vector<int> seen_t(static_cast<std::size_t>(m), 0);
  auto mark = [](std::vector<int>& seen, Index idx, Index bound, const char* side) {
    if (idx < 0 || idx >= bound) {
      throw Error(ErrorKind::kIndexOutOfBounds,
                  std::string(side) + " index " + std::to_string(idx) + " outside [0," + std::to_string(bound) + ")");
    }
    if (++seen[static_cast<std::size_t>(idx)] > 1) {
      throw Error(ErrorKind::kInvalidArgument, std::string(side) + " index " + std::to_string(idx) + " listed twice");
    }
  };
  for (const auto& [i, j] : gt.matches) {
    mark(seen_s, i, n, "source");
    mark(seen_t, j, m, "target");
  }
  for (Index i : gt.unmatched_source) mark(seen_s, i, n, "source");
  for (Index j : gt.unmatched_target) mark(seen_t, j, m, "target");
  auto check_covered = [](const std::vector<int>& seen, const char* side) {
    for (std::size_t i = 0; i < seen.size(); ++i) {
      if (seen[i] != 1) {
        throw Error(ErrorKind::kInvalidArgument,
                    std::string(side) + " index " + std::to_string(i) + " is neither matched nor unmatched");
      }
    }
  };
  check_covered(seen_s, "source");
  check_covered(seen_t, "target");
}

}  // namespace amatch
