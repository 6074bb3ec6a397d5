#include "amatch/adam.hpp"

#include <cmath>

#include "amatch/error.hpp"

namespace amatch {

AdamState AdamState::zeros_like(const ModelParams& params) {
  AdamState s;
  for (const auto& t : params.tensors) {
    s.m.push_back(Matrix::Zero(t.value.rows(), t.value.cols()));
    s.v.push_back(Matrix::Zero(t.value.rows(), t.value.cols()));
  }
  return s;
}

void adam_step(ModelParams& params, std::span<const Matrix> grads, AdamState& state, const AdamHyper& hyper) {
  const std::size_t count = params.tensors.size();
  require(grads.size() == count && state.m.size() == count && state.v.size() == count, ErrorKind::kShapeMismatch,
          "adam: " + std::to_string(count) + " tensors, " + std::to_string(grads.size()) + " gradients, " +
              std::to_string(state.m.size()) + " moments");
  for (std::size_t i = 0; i < count; ++i) {
    const Matrix& p = params.tensors[i].value;
    if (grads[i].rows() != p.rows() || grads[i].cols() != p.cols() || state.m[i].rows() != p.rows() ||
        state.m[i].cols() != p.cols() || state.v[i].rows() != p.rows() || state.v[i].cols() != p.cols()) {
      throw Error(ErrorKind::kShapeMismatch, "adam: shape mismatch for " + params.tensors[i].name);
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(hyper.beta1, t);
  const double bc2 = 1.0 - std::pow(hyper.beta2, t);
  for (std::size_t i = 0; i < count; ++i) {
    Matrix& m = state.m[i];
    Matrix& v = state.v[i];
    m = hyper.beta1 * m + (1.0 - hyper.beta1) * grads[i];
    v = hyper.beta2 * v + (1.0 - hyper.beta2) * grads[i].cwiseProduct(grads[i]);
    auto m_hat = m.array() / bc1;
    auto v_hat = v.array() / bc2;
    params.tensors[i].value.array() -= hyper.lr * m_hat / (v_hat.sqrt() + hyper.eps);
  }
}

double global_norm(std::span<const Matrix> grads) {
  double sq = 0.0;
  for (const auto& g : grads) sq += g.squaredNorm();
  return std::sqrt(sq);
}

double clip_global_norm(std::span<Matrix> grads, double max_norm) {
  const double norm = global_norm(grads);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (auto& g : grads) g *= s;
  }
  return norm;
}

}  // namespace amatch
