#include "amatch/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace amatch::ad {
namespace {

double evaluate(const MultiScalarFunction& f, const std::vector<Matrix>& thetas) {
  Tape<double> tape(/*record=*/false);
  std::vector<Var> vars;
  vars.reserve(thetas.size());
  for (const auto& t : thetas) vars.push_back(tape.parameter(t));
  return tape.value(f(tape, vars))(0, 0);
}

}  // namespace

std::vector<GradCheckResult> grad_check(const MultiScalarFunction& f, std::span<const Matrix> thetas, double h,
                                        double floor) {
  std::vector<Matrix> work(thetas.begin(), thetas.end());

  Tape<double> tape;
  std::vector<Var> vars;
  for (const auto& t : work) vars.push_back(tape.parameter(t));
  const Var loss = f(tape, vars);
  const auto grads = tape.backward(loss);

  std::vector<GradCheckResult> results(work.size());
  for (std::size_t p = 0; p < work.size(); ++p) {
    const Matrix analytic = grads.of(vars[p]);
    auto& res = results[p];
    for (Index r = 0; r < work[p].rows(); ++r) {
      for (Index c = 0; c < work[p].cols(); ++c) {
        const double saved = work[p](r, c);
        work[p](r, c) = saved + h;
        const double plus = evaluate(f, work);
        work[p](r, c) = saved - h;
        const double minus = evaluate(f, work);
        work[p](r, c) = saved;

        const double numeric = (plus - minus) / (2.0 * h);
        const double a = analytic(r, c);
        const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
        if (err > res.max_relative_error || res.worst_row < 0) {
          res = {err, r, c, a, numeric};
        }
      }
    }
  }
  return results;
}

GradCheckResult grad_check(const ScalarFunction& f, const Matrix& theta, double h, double floor) {
  const Matrix thetas[] = {theta};
  return grad_check([&f](Tape<double>& t, std::span<const Var> v) { return f(t, v[0]); }, thetas, h, floor)[0];
}

}  // namespace amatch::ad
