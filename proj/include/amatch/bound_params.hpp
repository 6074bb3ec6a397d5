#pragma once

#include <optional>
#include <span>
#include <vector>

#include "amatch/model_params.hpp"
#include "amatch/tape.hpp"

namespace amatch {

// ModelParams slots registered as leaves of one tape.
struct BoundParams {
  std::vector<ad::Var> vars;

  ad::Var operator[](int slot) const { return vars.at(static_cast<std::size_t>(slot)); }
  std::optional<ad::Var> optional(int slot) const {
    if (slot < 0) return std::nullopt;
    return (*this)[slot];
  }
};

template <class Real>
BoundParams bind_params(ad::Tape<Real>& tape, std::span<const MatrixT<Real>> tensors) {
  BoundParams b;
  b.vars.reserve(tensors.size());
  for (const auto& t : tensors) b.vars.push_back(tape.parameter(t));
  return b;
}

inline BoundParams bind_params(ad::Tape<double>& tape, const ModelParams& params) {
  BoundParams b;
  b.vars.reserve(params.tensors.size());
  for (const auto& t : params.tensors) b.vars.push_back(tape.parameter(t.value));
  return b;
}

template <class Real>
ad::Var apply_linear(ad::Tape<Real>& tape, const BoundParams& p, const LinearSlots& s, ad::Var x) {
  return tape.linear(x, p[s.weight], p.optional(s.bias));
}

}  // namespace amatch
