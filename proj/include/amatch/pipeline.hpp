#pragma once

#include <vector>

#include "amatch/amatformer.hpp"
#include "amatch/config.hpp"
#include "amatch/types.hpp"

namespace amatch {

struct PipelineVars {
  ad::Var f_source, f_target;  // encoded features
  AnchorPairs anchors;
  ForwardOutput forward;
  ad::Var scores;    // n x m
  ad::Var log_plan;  // (n+1) x (m+1)
};

// encode -> select anchors -> forward -> similarity -> dustbin -> Sinkhorn.
template <class Real>
PipelineVars run_pipeline(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
                          const MatchProblem& problem);

struct MatchResult {
  Correspondences matches;
  Matrix plan;  // exponentiated, (n+1) x (m+1)
  AnchorPairs anchors;
};

// Inference in double precision without gradient recording.
MatchResult match(const ModelParams& params, const MatchProblem& problem, double threshold);

template <class Real>
struct LossVars {
  ad::Var total;
  ad::Var matching;
  std::vector<ad::Var> units;
};

// Records the training objective for one problem on the tape.
template <class Real>
LossVars<Real> record_loss(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
                           const MatchProblem& problem, const GroundTruth& gt, const TrainConfig& train,
                           PipelineVars* vars = nullptr);

struct LossBreakdown {
  double total = 0.0;
  double matching = 0.0;
  double anchor = 0.0;  // sum of the per-unit anchor losses
};

struct StepOutput {
  LossBreakdown loss;
  std::vector<Matrix> grads;  // aligned with params.tensors
};

StepOutput loss_and_gradients(const ModelParams& params, const MatchProblem& problem, const GroundTruth& gt,
                              const TrainConfig& train);

}  // namespace amatch
