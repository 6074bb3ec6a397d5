#include "amatch/trainer.hpp"

#include <cmath>
#include <cstdio>

#include "amatch/error.hpp"
#include "amatch/metrics.hpp"
#include "amatch/pipeline.hpp"

namespace amatch {
namespace {

constexpr std::uint64_t kTrainStream = 0x7261696e;
constexpr std::uint64_t kHeldOutStream = 0x68656c64;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  return rng();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string metrics_csv_header() { return "step,loss,l_m,l_anchor,precision"; }

std::string metrics_csv_line(const MetricsRow& row) {
  std::string line = std::to_string(row.step) + "," + format_double(row.loss) + "," + format_double(row.l_m) + "," +
                     format_double(row.l_anchor) + ",";
  if (row.precision) line += format_double(*row.precision);
  return line;
}

SyntheticProblem training_problem(const TrainConfig& config, std::int64_t step) {
  return generate_problem(config.data, derive_seed(config.seed, kTrainStream, static_cast<std::uint64_t>(step)));
}

std::vector<SyntheticProblem> held_out_set(const TrainConfig& config) {
  std::vector<SyntheticProblem> out;
  out.reserve(static_cast<std::size_t>(config.eval_problems));
  for (int i = 0; i < config.eval_problems; ++i) {
    out.push_back(generate_problem(config.data, derive_seed(config.seed, kHeldOutStream, static_cast<std::uint64_t>(i))));
  }
  return out;
}

double held_out_precision(const ModelParams& params, const std::vector<SyntheticProblem>& problems) {
  if (problems.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : problems) {
    total += precision(match(params, p.problem, params.config.match_threshold).matches, p.gt).value;
  }
  return total / static_cast<double>(problems.size());
}

double baseline_precision(const std::vector<SyntheticProblem>& problems) {
  if (problems.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : problems) total += precision(nn_baseline(p.problem), p.gt).value;
  return total / static_cast<double>(problems.size());
}

Checkpoint TrainRun::checkpoint(const TrainConfig& config) const {
  Checkpoint c;
  c.params = params;
  c.train = config;
  c.resume = ResumeState{step, {}, adam};
  for (const auto& t : params.tensors) c.resume->params.push_back(t.value);
  return c;
}

TrainRun train(const TrainConfig& config, const std::optional<ResumeState>& resume, const MetricsCallback& on_row) {
  config.check();
  TrainRun run;
  run.params = init_params(config.model, config.seed);
  run.adam = AdamState::zeros_like(run.params);
  if (resume) {
    require(resume->params.size() == run.params.tensors.size(), ErrorKind::kShapeMismatch,
            "resume state does not match the model configuration");
    for (std::size_t i = 0; i < run.params.tensors.size(); ++i) {
      require(resume->params[i].rows() == run.params.tensors[i].value.rows() &&
                  resume->params[i].cols() == run.params.tensors[i].value.cols(),
              ErrorKind::kShapeMismatch, "resume tensor shape differs for " + run.params.tensors[i].name);
      run.params.tensors[i].value = resume->params[i];
    }
    run.adam = resume->adam;
    run.step = resume->step;
  }

  const auto held_out = held_out_set(config);
  AdamHyper hyper{config.lr, config.beta1, config.beta2, config.eps};
  for (std::int64_t step = run.step + 1; step <= config.steps; ++step) {
    const SyntheticProblem sample = training_problem(config, step);
    const auto non_finite = [&] {
      return Error(ErrorKind::kNonFiniteLoss, "loss is not finite at step " + std::to_string(step));
    };
    StepOutput out;
    try {
      out = loss_and_gradients(run.params, sample.problem, sample.gt, config);
    } catch (const Error& e) {
      // Diverged weights surface as non-finite features before the loss exists.
      if (e.kind() == ErrorKind::kNonFiniteValue) throw non_finite();
      throw;
    }
    if (!std::isfinite(out.loss.total)) throw non_finite();
    clip_global_norm(out.grads, config.clip_norm);
    hyper.lr = config.lr;
    if (config.lr_linear_decay) {
      hyper.lr *= 1.0 - static_cast<double>(step - 1) / static_cast<double>(config.steps);
    }
    adam_step(run.params, out.grads, run.adam, hyper);
    run.step = step;

    MetricsRow row{step, out.loss.total, out.loss.matching, out.loss.anchor, std::nullopt};
    const bool eval_now = (config.eval_interval > 0 && step % config.eval_interval == 0) || step == config.steps;
    if (eval_now) {
      row.precision = held_out_precision(run.params, held_out);
      run.final_precision = row.precision;
    }
    run.log.push_back(row);
    if (on_row) on_row(row);
  }
  if (!run.final_precision) run.final_precision = held_out_precision(run.params, held_out);
  return run;
}

}  // namespace amatch
