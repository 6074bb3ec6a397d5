#include "amatch/pipeline.hpp"

#include "amatch/anchors.hpp"
#include "amatch/assignment.hpp"
#include "amatch/encoder.hpp"
#include "amatch/error.hpp"
#include "amatch/losses.hpp"

namespace amatch {

template <class Real>
PipelineVars run_pipeline(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
                          const MatchProblem& problem) {
  validate(problem);
  const auto& cfg = params.config;
  PipelineVars out;
  out.f_source = encode(tape, params, bound, problem.source);
  out.f_target = encode(tape, params, bound, problem.target);

  std::vector<Candidate> candidates;
  if (cfg.ratio_source == RatioSource::kRaw) {
    candidates = nn_ratio_scores<double>(problem.source.descriptors.values, problem.target.descriptors.values,
                                         cfg.mutual_anchor_filter);
  } else {
    candidates = nn_ratio_scores<Real>(tape.value(out.f_source), tape.value(out.f_target), cfg.mutual_anchor_filter);
  }
  out.anchors = select_anchors<Real>(candidates, cfg.anchors, tape.value(out.f_source), tape.value(out.f_target));

  out.forward = forward(tape, params, bound, out.f_source, out.f_target, out.anchors);
  out.scores = similarity(tape, params, bound, out.forward.out_source, out.forward.out_target);
  const ad::Var augmented = tape.append_dustbin(out.scores, bound[params.layout.dustbin]);
  out.log_plan = sinkhorn_log(tape, augmented, cfg.sinkhorn_iters);
  return out;
}

MatchResult match(const ModelParams& params, const MatchProblem& problem, double threshold) {
  ad::Tape<double> tape(/*record=*/false);
  const auto bound = bind_params(tape, params);
  PipelineVars vars = run_pipeline(tape, params, bound, problem);
  MatchResult result;
  result.plan = tape.value(vars.log_plan).array().exp();
  result.matches = extract_matches(result.plan, threshold);
  result.anchors = std::move(vars.anchors);
  return result;
}

template <class Real>
LossVars<Real> record_loss(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
                           const MatchProblem& problem, const GroundTruth& gt, const TrainConfig& train,
                           PipelineVars* vars) {
  PipelineVars local = run_pipeline(tape, params, bound, problem);
  LossVars<Real> loss;
  loss.matching = matching_loss(tape, local.log_plan, gt);
  const auto labels = anchor_labels(local.anchors, gt, problem, train.label_mode, train.tau);
  for (const ad::Var logits : local.forward.logits) loss.units.push_back(anchor_unit_loss(tape, logits, labels));
  loss.total = total_loss(tape, loss.matching, loss.units, train.alpha);
  if (vars != nullptr) *vars = std::move(local);
  return loss;
}

StepOutput loss_and_gradients(const ModelParams& params, const MatchProblem& problem, const GroundTruth& gt,
                              const TrainConfig& train) {
  ad::Tape<double> tape;
  const auto bound = bind_params(tape, params);
  const auto loss = record_loss(tape, params, bound, problem, gt, train);
  StepOutput out;
  out.loss.total = tape.value(loss.total)(0, 0);
  out.loss.matching = tape.value(loss.matching)(0, 0);
  for (const ad::Var u : loss.units) out.loss.anchor += tape.value(u)(0, 0);
  const auto grads = tape.backward(loss.total);
  out.grads.reserve(bound.vars.size());
  for (const ad::Var v : bound.vars) out.grads.push_back(grads.of(v));
  return out;
}

template PipelineVars run_pipeline<float>(ad::Tape<float>&, const ModelParams&, const BoundParams&,
                                          const MatchProblem&);
template PipelineVars run_pipeline<double>(ad::Tape<double>&, const ModelParams&, const BoundParams&,
                                           const MatchProblem&);
template LossVars<float> record_loss<float>(ad::Tape<float>&, const ModelParams&, const BoundParams&,
                                            const MatchProblem&, const GroundTruth&, const TrainConfig&,
                                            PipelineVars*);
template LossVars<double> record_loss<double>(ad::Tape<double>&, const ModelParams&, const BoundParams&,
                                              const MatchProblem&, const GroundTruth&, const TrainConfig&,
                                              PipelineVars*);

}  // namespace amatch
