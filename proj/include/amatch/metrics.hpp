#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>

#include "amatch/types.hpp"

namespace amatch {

struct PrecisionResult {
  double value = 0.0;
  bool empty = false;  // no predictions; value is 0 by convention
};

// Number of predicted pairs that appear in T.
std::int64_t correct_count(const Correspondences& pred, const GroundTruth& gt);

PrecisionResult precision(const Correspondences& pred, const GroundTruth& gt);

// Throws EmptyGroundTruth when T is empty.
double recall(const Correspondences& pred, const GroundTruth& gt);

// Correct matches over (n + m) / 2.
double matching_score(const Correspondences& pred, const GroundTruth& gt, Index n, Index m);

// Mutual nearest neighbours on raw descriptors; confidence 1 / (1 + distance).
Correspondences nn_baseline(const MatchProblem& problem);

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double matching_score = 0.0;
  std::int64_t num_pred = 0;
  std::int64_t num_gt = 0;
  bool empty_pred = false;
};

EvalReport evaluate(const Correspondences& pred, const GroundTruth& gt, Index n, Index m);

// Field-wise mean; counts are summed.
EvalReport aggregate(const std::vector<EvalReport>& reports);

void to_json(nlohmann::json& j, const EvalReport& r);

}  // namespace amatch
