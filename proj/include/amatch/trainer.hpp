#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "amatch/adam.hpp"
#include "amatch/checkpoint.hpp"
#include "amatch/config.hpp"
#include "amatch/synth.hpp"

namespace amatch {

struct MetricsRow {
  std::int64_t step = 0;
  double loss = 0.0;
  double l_m = 0.0;
  double l_anchor = 0.0;                // sum over units, before the alpha weight
  std::optional<double> precision;      // held-out, on evaluation steps only
};

// CSV header `step,loss,l_m,l_anchor,precision` and one line per row; an
// empty precision field marks steps without evaluation.
std::string metrics_csv_header();
std::string metrics_csv_line(const MetricsRow& row);

// Training problem for a 1-based step, from its own seed stream.
SyntheticProblem training_problem(const TrainConfig& config, std::int64_t step);

// Held-out problems; their seed stream never overlaps the training stream.
std::vector<SyntheticProblem> held_out_set(const TrainConfig& config);

// Mean per-problem precision of the model's hard matches.
double held_out_precision(const ModelParams& params, const std::vector<SyntheticProblem>& problems);

// Mean per-problem precision of mutual nearest neighbours on raw descriptors.
double baseline_precision(const std::vector<SyntheticProblem>& problems);

struct TrainRun {
  ModelParams params;
  AdamState adam;
  std::int64_t step = 0;
  std::vector<MetricsRow> log;  // rows produced by this call only
  std::optional<double> final_precision;

  Checkpoint checkpoint(const TrainConfig& config) const;
};

using MetricsCallback = std::function<void(const MetricsRow&)>;

// Runs steps (resume.step, config.steps]. Without a resume state the model
// starts from init_params(config.model, config.seed). Throws NonFiniteLoss
// naming the step when the loss stops being finite.
TrainRun train(const TrainConfig& config, const std::optional<ResumeState>& resume = std::nullopt,
               const MetricsCallback& on_row = {});

}  // namespace amatch
