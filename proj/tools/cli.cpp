#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "amatch/bench.hpp"
#include "amatch/checkpoint.hpp"
#include "amatch/feature_io.hpp"
#include "amatch/flops.hpp"
#include "amatch/io.hpp"
#include "amatch/metrics.hpp"
#include "amatch/pipeline.hpp"
#include "amatch/synth.hpp"
#include "amatch/trainer.hpp"

namespace amatch::cli {
namespace {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kInvalidArgument: return kUsage;
    case ErrorKind::kFileFormat:
    case ErrorKind::kIo: return kFormat;
    case ErrorKind::kShapeMismatch: return kShape;
    case ErrorKind::kNonFiniteValue:
    case ErrorKind::kNonFiniteLoss: return kNumeric;
    default: return kFailure;
  }
}

// Parallelism cap from AMATCH_THREADS; 0 when unset or invalid.
int thread_cap() {
  const char* env = std::getenv("AMATCH_THREADS");
  if (env == nullptr) return 0;
  try {
    return std::max(0, std::stoi(env));
  } catch (const std::exception&) {
    return 0;
  }
}

std::string with_commas(std::int64_t v) {
  std::string digits = std::to_string(v < 0 ? -v : v);
  for (int pos = static_cast<int>(digits.size()) - 3; pos > 0; pos -= 3) {
    digits.insert(static_cast<std::size_t>(pos), ",");
  }
  return v < 0 ? "-" + digits : digits;
}

struct FlopsArgs {
  std::int64_t n = 1000, k = 128, c = 128;
  std::string format = "csv";
};

struct BenchArgs {
  BenchOptions options;
  std::string mode = "both";
};

struct GenArgs {
  std::string out;
  int count = 1;
  std::uint64_t seed = 1;
  std::string config;
  bool json = false;
};

// Architecture flags accepted by train.
struct ModelOverrides {
  std::optional<int> anchors;
  std::optional<int> units;
  std::optional<int> heads;
  bool no_ffn = false;
  bool no_cross = false;
};

struct TrainArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string metrics;
  std::string resume;
  std::optional<int> steps;
  std::optional<double> alpha;
  std::optional<double> lr;
  std::optional<std::string> metric;
  ModelOverrides model;
};

struct MatchArgs {
  std::string source, target, checkpoint;
  std::string out, summary;
  std::optional<double> threshold;
  std::optional<int> anchors;
};

struct EvalArgs {
  std::string dir;
  std::string checkpoint;
  std::string out;
  int jobs = 1;
  bool baseline = false;
  std::optional<double> threshold;
};

void add_model_overrides(CLI::App* app, ModelOverrides& m) {
  app->add_option("--anchors", m.anchors, "Anchor count k")->check(CLI::PositiveNumber);
  app->add_option("--units", m.units, "Processing units R")->check(CLI::PositiveNumber);
  app->add_option("--heads", m.heads, "Attention heads")->check(CLI::PositiveNumber);
  app->add_flag("--no-ffn", m.no_ffn, "Disable the shared FFN");
  app->add_flag("--no-cross", m.no_cross, "Disable anchor cross attention");
}

void apply(const ModelOverrides& o, ModelConfig& m) {
  if (o.anchors) m.anchors = *o.anchors;
  if (o.units) m.units = *o.units;
  if (o.heads) m.heads = *o.heads;
  if (o.no_ffn) m.use_ffn = false;
  if (o.no_cross) m.use_cross = false;
}

int cmd_flops(const FlopsArgs& a, std::ostream& out) {
  const auto rows = flops_table(a.n, a.k, a.c);
  if (a.format == "table") {
    for (const auto& r : rows) out << std::left << std::setw(12) << r.model << with_commas(r.flops) << '\n';
  } else {
    out << flops_csv(rows);
  }
  return kOk;
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  std::vector<BenchMode> modes;
  if (a.mode == "both") {
    modes = {BenchMode::kAmatformer, BenchMode::kFullAttention};
  } else {
    modes = {parse_bench_mode(a.mode)};
  }
  out << bench_csv_header() << '\n';
  for (const BenchMode mode : modes) out << bench_csv_line(bench_forward(a.options, mode)) << '\n' << std::flush;
  return kOk;
}

TrainConfig load_config_file(const std::string& path, const TrainConfig& base) {
  if (path.empty()) return base;
  return parse_train_config(read_file(path), base);
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const TrainConfig cfg = load_config_file(a.config, toy_train_config());
  for (int i = 0; i < a.count; ++i) {
    std::ostringstream name;
    name << "problem_" << std::setw(4) << std::setfill('0') << i;
    const fs::path dir = fs::path(a.out) / name.str();
    const auto sample = generate_problem(cfg.data, a.seed + static_cast<std::uint64_t>(i));
    write_problem_dir(dir, sample.problem, sample.gt);
    if (a.json) {
      atomic_write(dir / "source.json", features_to_json(sample.problem.source).dump(1) + "\n");
      atomic_write(dir / "target.json", features_to_json(sample.problem.target).dump(1) + "\n");
    }
  }
  out << "wrote " << a.count << " problem(s) to " << a.out << '\n';
  return kOk;
}

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<ResumeState> resume;
  TrainConfig base = toy_train_config();
  if (!a.resume.empty()) {
    Checkpoint ckpt = read_checkpoint(a.resume);
    require(ckpt.resume.has_value(), ErrorKind::kFileFormat, a.resume + " carries no training state");
    if (ckpt.train) base = *ckpt.train;
    resume = std::move(ckpt.resume);
  }
  TrainConfig cfg = load_config_file(a.config, base);
  apply(a.model, cfg.model);
  if (a.seed) cfg.seed = *a.seed;
  if (a.steps) cfg.steps = *a.steps;
  if (a.alpha) cfg.alpha = *a.alpha;
  if (a.lr) cfg.lr = *a.lr;
  if (a.metric) cfg.model.metric = nlohmann::json{{"metric", *a.metric}}.get<ModelConfig>().metric;
  cfg.check();

  std::string csv = metrics_csv_header() + "\n";
  const TrainRun run = train(cfg, resume, [&](const MetricsRow& row) {
    csv += metrics_csv_line(row) + "\n";
    if (row.precision) err << "step " << row.step << " loss " << row.loss << " precision " << *row.precision << '\n';
  });
  write_checkpoint(a.out, run.checkpoint(cfg));
  const std::string metrics_path = a.metrics.empty() ? a.out + ".metrics.csv" : a.metrics;
  atomic_write(metrics_path, csv);
  nlohmann::json summary{{"steps", run.step}, {"checkpoint", a.out}, {"metrics", metrics_path}, {"config", cfg}};
  if (run.final_precision) summary["precision"] = *run.final_precision;
  out << summary.dump(1) << '\n';
  return kOk;
}

ModelParams load_model(const std::string& path) { return exact_params(read_checkpoint(path)); }

int cmd_match(const MatchArgs& a, std::ostream& out, std::ostream& err) {
  ModelParams params = load_model(a.checkpoint);
  if (a.anchors) params.config.anchors = *a.anchors;
  const double threshold = a.threshold.value_or(params.config.match_threshold);
  MatchProblem problem;
  problem.source = read_features(a.source);
  problem.target = read_features(a.target);
  const MatchResult result = match(params, problem, threshold);

  std::ostringstream csv;
  csv << "source_index,target_index,confidence\n" << std::setprecision(9);
  for (const auto& m : result.matches) csv << m.source << ',' << m.target << ',' << m.confidence << '\n';
  nlohmann::json summary{{"n", problem.n()},
                         {"m", problem.m()},
                         {"k", result.anchors.k()},
                         {"num_matches", result.matches.size()},
                         {"threshold", threshold},
                         {"config", params.config}};
  if (a.out.empty()) {
    out << csv.str();
  } else {
    atomic_write(a.out, csv.str());
  }
  const std::string summary_path = !a.summary.empty() ? a.summary : (a.out.empty() ? "" : a.out + ".json");
  if (summary_path.empty()) {
    err << summary.dump() << '\n';
  } else {
    atomic_write(summary_path, summary.dump(1) + "\n");
  }
  return kOk;
}

std::vector<fs::path> problem_dirs(const fs::path& root) {
  require(fs::is_directory(root), ErrorKind::kIo, root.string() + " is not a directory");
  std::vector<fs::path> dirs;
  if (fs::exists(root / "source.amft")) dirs.push_back(root);
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "source.amft")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  require(!dirs.empty(), ErrorKind::kInvalidArgument, root.string() + " contains no problems");
  return dirs;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto dirs = problem_dirs(a.dir);
  std::optional<ModelParams> params;
  if (!a.baseline) {
    require(!a.checkpoint.empty(), ErrorKind::kInvalidArgument, "--checkpoint is required unless --baseline is set");
    params = load_model(a.checkpoint);
  }
  const double threshold = a.threshold.value_or(params ? params->config.match_threshold : 0.0);

  int jobs = std::max(1, a.jobs);
  if (const int cap = thread_cap(); cap > 0) jobs = std::min(jobs, cap);
  jobs = std::min<int>(jobs, static_cast<int>(dirs.size()));

  std::vector<EvalReport> reports(dirs.size());
  std::vector<std::exception_ptr> failures(dirs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < dirs.size(); i = next++) {
      try {
        const auto [problem, gt] = read_problem_dir(dirs[i]);
        validate(gt, problem.n(), problem.m());
        const Correspondences pred =
            params ? match(*params, problem, threshold).matches : nn_baseline(problem);
        reports[i] = evaluate(pred, gt, problem.n(), problem.m());
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  nlohmann::json report = aggregate(reports);
  report["problems"] = dirs.size();
  const std::string text = report.dump(1) + "\n";
  if (a.out.empty()) {
    out << text;
  } else {
    atomic_write(a.out, text);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Anchor matching transformer: feature matching, training and benchmarks", "amatch"};
  app.require_subcommand(1);

  FlopsArgs flops;
  auto* flops_cmd = app.add_subcommand("flops", "Closed-form message-passing FLOPs");
  flops_cmd->add_option("n", flops.n, "Points per image")->check(CLI::PositiveNumber);
  flops_cmd->add_option("k", flops.k, "Anchors")->check(CLI::PositiveNumber);
  flops_cmd->add_option("c", flops.c, "Channels")->check(CLI::PositiveNumber);
  flops_cmd->add_option("--format", flops.format, "csv or table")->check(CLI::IsMember({"csv", "table"}));

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time anchor attention against full attention");
  bench_cmd->add_option("--n", bench.options.n, "Points per image")->check(CLI::Range(2, 1 << 20));
  bench_cmd->add_option("--anchors,--k", bench.options.k, "Anchors")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--c", bench.options.c, "Channels")->check(CLI::Range(2, 4096));
  bench_cmd->add_option("--units", bench.options.units, "Processing units")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--reps", bench.options.reps, "Timed repetitions")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--warmup", bench.options.warmup, "Untimed warmup passes")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.options.seed, "Seed for weights and inputs");
  bench_cmd->add_option("--mode", bench.mode, "amatformer, full_attention or both")
      ->check(CLI::IsMember({"amatformer", "full_attention", "both"}));

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Export synthetic problems");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--count", gen.count, "Number of problems")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "First seed; problem i uses seed + i");
  gen_cmd->add_option("--config", gen.config, "JSON config whose data keys are used");
  gen_cmd->add_flag("--json", gen.json, "Also write JSON mirrors of the feature files");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train on synthetic problems");
  train_cmd->add_option("--config", tr.config, "JSON config file");
  train_cmd->add_option("--seed", tr.seed, "Seed");
  train_cmd->add_option("--out", tr.out, "Checkpoint path")->required();
  train_cmd->add_option("--metrics", tr.metrics, "Metrics CSV path (default <out>.metrics.csv)");
  train_cmd->add_option("--resume", tr.resume, "Continue from a checkpoint with training state");
  train_cmd->add_option("--steps", tr.steps, "Total steps")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--alpha", tr.alpha, "Anchor loss weight")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--lr", tr.lr, "Learning rate")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--metric", tr.metric, "bilinear or cosine")->check(CLI::IsMember({"bilinear", "cosine"}));
  add_model_overrides(train_cmd, tr.model);

  MatchArgs ma;
  auto* match_cmd = app.add_subcommand("match", "Match two feature files");
  match_cmd->add_option("source", ma.source, "Source feature file")->required();
  match_cmd->add_option("target", ma.target, "Target feature file")->required();
  match_cmd->add_option("--checkpoint", ma.checkpoint, "Model checkpoint")->required();
  match_cmd->add_option("--out", ma.out, "Match CSV path (default stdout)");
  match_cmd->add_option("--summary", ma.summary, "Summary JSON path (default <out>.json)");
  match_cmd->add_option("--threshold", ma.threshold, "Minimum plan value")->check(CLI::Range(0.0, 1.0));
  match_cmd->add_option("--anchors", ma.anchors, "Anchor count k")->check(CLI::PositiveNumber);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate every problem in a directory");
  eval_cmd->add_option("dir", ev.dir, "Problem directory")->required();
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Model checkpoint");
  eval_cmd->add_option("--out", ev.out, "Report JSON path (default stdout)");
  eval_cmd->add_option("--jobs", ev.jobs, "Worker threads (capped by AMATCH_THREADS)")->check(CLI::PositiveNumber);
  eval_cmd->add_flag("--baseline", ev.baseline, "Evaluate mutual nearest neighbours instead of a model");
  eval_cmd->add_option("--threshold", ev.threshold, "Minimum plan value")->check(CLI::Range(0.0, 1.0));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*flops_cmd) return cmd_flops(flops, out);
    if (*bench_cmd) return cmd_bench(bench, out);
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*train_cmd) return cmd_train(tr, out, err);
    if (*match_cmd) return cmd_match(ma, out, err);
    if (*eval_cmd) return cmd_eval(ev, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace amatch::cli
