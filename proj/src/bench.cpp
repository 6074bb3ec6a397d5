#include "amatch/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "amatch/anchors.hpp"
#include "amatch/error.hpp"
#include "amatch/flops.hpp"
#include "amatch/op_counter.hpp"

namespace amatch {

std::string_view to_string(BenchMode mode) {
  return mode == BenchMode::kAmatformer ? "amatformer" : "full_attention";
}

BenchMode parse_bench_mode(std::string_view text) {
  if (text == "amatformer") return BenchMode::kAmatformer;
  if (text == "full_attention") return BenchMode::kFullAttention;
  throw Error(ErrorKind::kInvalidArgument, "unknown bench mode '" + std::string(text) + "'");
}

double median(std::vector<double> values) {
  require(!values.empty(), ErrorKind::kInvalidArgument, "median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double median_absolute_deviation(const std::vector<double>& values) {
  const double m = median(values);
  std::vector<double> dev;
  dev.reserve(values.size());
  for (double v : values) dev.push_back(std::abs(v - m));
  return median(std::move(dev));
}

template <class Real>
VarPair full_attention_forward(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
                               ad::Var f_source, ad::Var f_target) {
  ScopedStage stage(Stage::kFullAttention);
  const int h = params.config.heads;
  ad::Var fs = f_source;
  ad::Var ft = f_target;
  for (const auto& u : params.layout.units) {
    const ad::Var self_s = tape.add(fs, attention_message(tape, bound, u.self_source, fs, fs, h));
    const ad::Var self_t = tape.add(ft, attention_message(tape, bound, u.self_target, ft, ft, h));
    fs = tape.add(self_s, attention_message(tape, bound, u.cross, self_s, self_t, h));
    ft = tape.add(self_t, attention_message(tape, bound, u.cross, self_t, self_s, h));
  }
  return shared_ffn(tape, params, bound, fs, ft);
}

BenchReport bench_forward(const BenchOptions& options, BenchMode mode) {
  require(options.reps >= 1, ErrorKind::kInvalidArgument, "reps must be >= 1");
  require(options.warmup >= 1, ErrorKind::kInvalidArgument, "warmup must be >= 1");
  require(options.n >= 2 && options.k >= 1 && options.c >= 2, ErrorKind::kInvalidArgument,
          "bench needs n >= 2, k >= 1, c >= 2");

  ModelConfig cfg;
  cfg.channels = static_cast<int>(options.c);
  cfg.descriptor_dim = static_cast<int>(options.c);
  cfg.anchors = static_cast<int>(options.k);
  cfg.units = options.units;
  ModelParams params = init_params(cfg, options.seed);

  // Zero-initialized tensors get random values so no branch is trivially zero.
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(options.c)));
  for (auto& t : params.tensors) {
    if (t.value.isZero(0.0) && t.value.size() > 1) {
      for (Index i = 0; i < t.value.size(); ++i) t.value.data()[i] = normal(rng);
    }
  }
  const std::vector<MatrixF> weights = to_float(params);

  MatrixF fs(options.n, options.c);
  MatrixF ft(options.n, options.c);
  std::normal_distribution<float> unit(0.0f, 1.0f);
  for (Index i = 0; i < fs.size(); ++i) fs.data()[i] = unit(rng);
  for (Index i = 0; i < ft.size(); ++i) ft.data()[i] = unit(rng);

  auto run_once = [&] {
    ad::Tape<float> tape(/*record=*/false);
    const auto bound = bind_params<float>(tape, weights);
    const ad::Var vs = tape.constant(fs);
    const ad::Var vt = tape.constant(ft);
    if (mode == BenchMode::kAmatformer) {
      const auto candidates = nn_ratio_scores<float>(fs, ft, false);
      const auto anchors = select_anchors<float>(candidates, options.k, fs, ft);
      const auto out = forward(tape, params, bound, vs, vt, anchors);
      return tape.value(out.out_source)(0, 0);
    }
    const auto [out_s, out_t] = full_attention_forward(tape, params, bound, vs, vt);
    return tape.value(out_s)(0, 0);
  };

  BenchReport report;
  report.mode = mode;
  report.n = options.n;
  report.k = options.k;
  report.c = options.c;
  report.flops_formula = mode == BenchMode::kAmatformer ? flops_amatformer(options.n, options.k, options.c)
                                                        : flops_superglue(options.n, options.c);
  volatile float sink = 0.0f;
  for (int i = 0; i < options.warmup; ++i) sink = run_once();
  auto& counter = OpCounter::local();
  counter.reset();
  sink = run_once();
  report.macs = counter.total();
  for (int i = 0; i < options.reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    sink = run_once();
    const auto t1 = std::chrono::steady_clock::now();
    report.samples_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  (void)sink;
  report.median_ms = median(report.samples_ms);
  report.mad_ms = median_absolute_deviation(report.samples_ms);
  return report;
}

std::string bench_csv_header() { return "mode,n,k,c,median_ms,mad_ms,flops_formula"; }

std::string bench_csv_line(const BenchReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s,%lld,%lld,%lld,%.4f,%.4f,%lld", std::string(to_string(r.mode)).c_str(),
                static_cast<long long>(r.n), static_cast<long long>(r.k), static_cast<long long>(r.c), r.median_ms,
                r.mad_ms, static_cast<long long>(r.flops_formula));
  return buf;
}

template VarPair full_attention_forward<float>(ad::Tape<float>&, const ModelParams&, const BoundParams&, ad::Var,
                                               ad::Var);
template VarPair full_attention_forward<double>(ad::Tape<double>&, const ModelParams&, const BoundParams&, ad::Var,
                                                ad::Var);

}  // namespace amatch
