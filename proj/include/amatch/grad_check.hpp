#pragma once

#include <functional>
#include <span>
#include <vector>

#include "amatch/tape.hpp"

namespace amatch::ad {

struct GradCheckResult {
  double max_relative_error = 0.0;
  Index worst_row = -1;
  Index worst_col = -1;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Records a scalar on the tape as a function of the leaf parameters.
using ScalarFunction = std::function<Var(Tape<double>& tape, Var theta)>;
using MultiScalarFunction = std::function<Var(Tape<double>& tape, std::span<const Var> thetas)>;

// Compares the tape gradient with central differences
// (f(theta + h) - f(theta - h)) / 2h entry by entry. Per-entry relative error
// is |a - n| / max(|a|, |n|, floor); floor keeps structurally-zero entries
// from amplifying round-off.
GradCheckResult grad_check(const ScalarFunction& f, const Matrix& theta, double h = 1e-5, double floor = 1e-6);

// One result per parameter tensor.
std::vector<GradCheckResult> grad_check(const MultiScalarFunction& f, std::span<const Matrix> thetas,
                                        double h = 1e-5, double floor = 1e-6);

}  // namespace amatch::ad
