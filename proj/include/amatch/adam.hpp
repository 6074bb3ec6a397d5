#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "amatch/model_params.hpp"

namespace amatch {

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::int64_t step = 0;

  static AdamState zeros_like(const ModelParams& params);
};

// One bias-corrected Adam update of every tensor. Throws ShapeMismatch when
// grads or state do not line up with params.
void adam_step(ModelParams& params, std::span<const Matrix> grads, AdamState& state, const AdamHyper& hyper);

// Global L2 norm over all tensors.
double global_norm(std::span<const Matrix> grads);

// Rescales grads in place so their global norm is at most max_norm; returns
// the norm before clipping. max_norm <= 0 disables clipping.
double clip_global_norm(std::span<Matrix> grads, double max_norm);

}  // namespace amatch
