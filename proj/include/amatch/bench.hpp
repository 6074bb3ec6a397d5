#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "amatch/amatformer.hpp"

namespace amatch {

enum class BenchMode { kAmatformer, kFullAttention };

std::string_view to_string(BenchMode mode);
BenchMode parse_bench_mode(std::string_view text);

struct BenchOptions {
  Index n = 1024;  // points per image (n = m)
  Index k = 128;
  Index c = 128;
  int units = 3;
  int reps = 20;
  int warmup = 3;
  std::uint64_t seed = 1;
};

struct BenchReport {
  BenchMode mode = BenchMode::kAmatformer;
  Index n = 0, k = 0, c = 0;
  std::vector<double> samples_ms;
  double median_ms = 0.0;
  double mad_ms = 0.0;  // median absolute deviation
  std::int64_t flops_formula = 0;
  std::int64_t macs = 0;  // counted multiply-adds of one pass
};

double median(std::vector<double> values);
double median_absolute_deviation(const std::vector<double>& values);

// Reference pass over all points: per unit, self attention (n x n) and cross
// attention (n x m) with the unit's projections, then the shared FFN.
template <class Real>
VarPair full_attention_forward(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
                               ad::Var f_source, ad::Var f_target);

// Times one forward pass in single precision on random encoded features.
// AMatFormer timing includes anchor selection; neither mode includes encoding.
BenchReport bench_forward(const BenchOptions& options, BenchMode mode);

// CSV header `mode,n,k,c,median_ms,mad_ms,flops_formula` and one line.
std::string bench_csv_header();
std::string bench_csv_line(const BenchReport& report);

}  // namespace amatch
