#pragma once

#include <utility>
#include <vector>

#include "amatch/bound_params.hpp"
#include "amatch/types.hpp"

namespace amatch {

using VarPair = std::pair<ad::Var, ad::Var>;

// LP(softmax(Q K^T / sqrt(c / heads)) V) with Q from `queries` and K, V from
// `keys`. Heads split the channels into equal contiguous slices.
template <class Real>
ad::Var attention_message(ad::Tape<Real>& tape, const BoundParams& bound, const AttentionSlots& slots,
                          ad::Var queries, ad::Var keys, int heads);

// Y1 = A + message(A, A), per branch.
template <class Real>
VarPair anchor_self_attention(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
                              int unit, ad::Var anchors_source, ad::Var anchors_target);

// Y2_s = Y1_s + message(Y1_s, Y1_t) and the mirror image, one shared set of
// projections for both directions.
template <class Real>
VarPair anchor_cross_attention(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
                               int unit, ad::Var y1_source, ad::Var y1_target);

// Y3 = F + message(F, Y2), per branch; the attention map is n x k.
template <class Real>
VarPair anchor_primary_attention(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
                                 int index, ad::Var f_source, ad::Var f_target, ad::Var y2_source,
                                 ad::Var y2_target);

// Ytilde = FFN(LN(Y3)) + Y3 with one parameter set for both branches.
// Without an FFN in the layout, returns the inputs unchanged.
template <class Real>
VarPair shared_ffn(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
                   ad::Var y3_source, ad::Var y3_target);

// k x 1 logits w . (Y2_s[i] * Y2_t[i]) + b.
template <class Real>
ad::Var anchor_logits(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound, int unit,
                      ad::Var y2_source, ad::Var y2_target);

struct ForwardOutput {
  std::vector<ad::Var> y1_source, y1_target;
  std::vector<ad::Var> y2_source, y2_target;
  std::vector<ad::Var> logits;  // one k x 1 column per unit
  ad::Var y3_source, y3_target;
  ad::Var out_source, out_target;  // Ytilde
};

// Runs the R units on the anchors gathered from F, then anchor-primary
// attention and the shared FFN.
template <class Real>
ForwardOutput forward(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound, ad::Var f_source,
                      ad::Var f_target, const AnchorPairs& anchors);

}  // namespace amatch
