#include "amatch/amatformer.hpp"

#include <cmath>

#include "amatch/error.hpp"
#include "amatch/op_counter.hpp"

namespace amatch {
namespace {

template <class Real>
void require_width(const ad::Tape<Real>& tape, ad::Var v, Index c, const char* what) {
  if (tape.value(v).cols() != c) {
    throw Error(ErrorKind::kShapeMismatch, std::string(what) + " has " + std::to_string(tape.value(v).cols()) +
                                               " columns, model width is " + std::to_string(c));
  }
}

}  // namespace

template <class Real>
ad::Var attention_message(ad::Tape<Real>& tape, const BoundParams& bound, const AttentionSlots& slots,
                          ad::Var queries, ad::Var keys, int heads) {
  const ad::Var q = apply_linear(tape, bound, slots.query, queries);
  const ad::Var k = apply_linear(tape, bound, slots.key, keys);
  const ad::Var v = apply_linear(tape, bound, slots.value, keys);
  const Index c = tape.value(q).cols();
  require(heads >= 1 && c % heads == 0, ErrorKind::kShapeMismatch,
          "width " + std::to_string(c) + " does not split into " + std::to_string(heads) + " heads");
  const Index width = c / heads;
  const Real inv_sqrt = Real(1) / std::sqrt(static_cast<Real>(width));

  ad::Var message;
  if (heads == 1) {
    const ad::Var attn = tape.softmax_rows(tape.scale(tape.matmul_transposed(q, k), inv_sqrt));
    message = tape.matmul(attn, v);
  } else {
    std::vector<ad::Var> parts;
    parts.reserve(static_cast<std::size_t>(heads));
    for (int h = 0; h < heads; ++h) {
      const Index start = h * width;
      const ad::Var qh = tape.slice_cols(q, start, width);
      const ad::Var kh = tape.slice_cols(k, start, width);
      const ad::Var vh = tape.slice_cols(v, start, width);
      const ad::Var attn = tape.softmax_rows(tape.scale(tape.matmul_transposed(qh, kh), inv_sqrt));
      parts.push_back(tape.matmul(attn, vh));
    }
    message = tape.concat_cols(parts);
  }
  return apply_linear(tape, bound, slots.out, message);
}

template <class Real>
VarPair anchor_self_attention(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
                              int unit, ad::Var anchors_source, ad::Var anchors_target) {
  ScopedStage stage(Stage::kAnchorUnits);
  const Index c = params.config.channels;
  require_width(tape, anchors_source, c, "source anchors");
  require_width(tape, anchors_target, c, "target anchors");
  const auto& u = params.layout.units.at(static_cast<std::size_t>(unit));
  const int h = params.config.heads;
  const ad::Var ms = attention_message(tape, bound, u.self_source, anchors_source, anchors_source, h);
  const ad::Var mt = attention_message(tape, bound, u.self_target, anchors_target, anchors_target, h);
  return {tape.add(anchors_source, ms), tape.add(anchors_target, mt)};
}

template <class Real>
VarPair anchor_cross_attention(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
                               int unit, ad::Var y1_source, ad::Var y1_target) {
  ScopedStage stage(Stage::kAnchorUnits);
  require(tape.value(y1_source).rows() == tape.value(y1_target).rows(), ErrorKind::kShapeMismatch,
          "cross attention needs the same anchor count on both sides");
  const auto& u = params.layout.units.at(static_cast<std::size_t>(unit));
  const int h = params.config.heads;
  const ad::Var ms = attention_message(tape, bound, u.cross, y1_source, y1_target, h);
  const ad::Var mt = attention_message(tape, bound, u.cross, y1_target, y1_source, h);
  return {tape.add(y1_source, ms), tape.add(y1_target, mt)};
}

template <class Real>
VarPair anchor_primary_attention(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
                                 int index, ad::Var f_source, ad::Var f_target, ad::Var y2_source,
                                 ad::Var y2_target) {
  ScopedStage stage(Stage::kAnchorPrimary);
  const Index c = params.config.channels;
  require_width(tape, f_source, c, "source features");
  require_width(tape, f_target, c, "target features");
  const auto& slots = params.layout.primary.at(static_cast<std::size_t>(index));
  const int h = params.config.heads;
  const ad::Var ms = attention_message(tape, bound, slots, f_source, y2_source, h);
  const ad::Var mt = attention_message(tape, bound, slots, f_target, y2_target, h);
  return {tape.add(f_source, ms), tape.add(f_target, mt)};
}

template <class Real>
VarPair shared_ffn(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
                   ad::Var y3_source, ad::Var y3_target) {
  const auto& L = params.layout;
  if (!L.has_ffn) return {y3_source, y3_target};
  ScopedStage stage(Stage::kFfn);
  const auto& f = L.ffn;
  auto branch = [&](ad::Var y) {
    const ad::Var normed = tape.layer_norm(y, bound[f.ln_gain], bound[f.ln_bias]);
    ad::Var hidden = apply_linear(tape, bound, f.hidden, normed);
    hidden = params.config.ffn_activation == Activation::kGelu ? tape.gelu(hidden) : tape.relu(hidden);
    return tape.add(apply_linear(tape, bound, f.out, hidden), y);
  };
  const ad::Var out_s = branch(y3_source);
  const ad::Var out_t = branch(y3_target);
  return {out_s, out_t};
}

template <class Real>
ad::Var anchor_logits(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound, int unit,
                      ad::Var y2_source, ad::Var y2_target) {
  ScopedStage stage(Stage::kAnchorUnits);
  const auto& u = params.layout.units.at(static_cast<std::size_t>(unit));
  return apply_linear(tape, bound, u.anchor_head, tape.hadamard(y2_source, y2_target));
}

template <class Real>
ForwardOutput forward(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound, ad::Var f_source,
                      ad::Var f_target, const AnchorPairs& anchors) {
  const auto& cfg = params.config;
  require(anchors.k() >= 1, ErrorKind::kNoCandidates, "forward needs at least one anchor");
  ForwardOutput out;
  ad::Var a_s = tape.gather_rows(f_source, anchors.source_indices);
  ad::Var a_t = tape.gather_rows(f_target, anchors.target_indices);
  ad::Var fs = f_source;
  ad::Var ft = f_target;
  for (int r = 0; r < cfg.units; ++r) {
    const auto [y1s, y1t] = anchor_self_attention(tape, params, bound, r, a_s, a_t);
    ad::Var y2s = y1s;
    ad::Var y2t = y1t;
    if (cfg.use_cross) std::tie(y2s, y2t) = anchor_cross_attention(tape, params, bound, r, y1s, y1t);
    out.y1_source.push_back(y1s);
    out.y1_target.push_back(y1t);
    out.y2_source.push_back(y2s);
    out.y2_target.push_back(y2t);
    out.logits.push_back(anchor_logits(tape, params, bound, r, y2s, y2t));
    if (cfg.primary_every_unit) std::tie(fs, ft) = anchor_primary_attention(tape, params, bound, r, fs, ft, y2s, y2t);
    a_s = y2s;
    a_t = y2t;
  }
  if (!cfg.primary_every_unit) std::tie(fs, ft) = anchor_primary_attention(tape, params, bound, 0, fs, ft, a_s, a_t);
  out.y3_source = fs;
  out.y3_target = ft;
  std::tie(out.out_source, out.out_target) = shared_ffn(tape, params, bound, fs, ft);
  return out;
}

#define AMATCH_INSTANTIATE(Real)                                                                                    \
  template ad::Var attention_message<Real>(ad::Tape<Real>&, const BoundParams&, const AttentionSlots&, ad::Var,     \
                                           ad::Var, int);                                                           \
  template VarPair anchor_self_attention<Real>(ad::Tape<Real>&, const ModelParams&, const BoundParams&, int,        \
                                               ad::Var, ad::Var);                                                   \
  template VarPair anchor_cross_attention<Real>(ad::Tape<Real>&, const ModelParams&, const BoundParams&,            \
                                                int, ad::Var, ad::Var);                                             \
  template VarPair anchor_primary_attention<Real>(ad::Tape<Real>&, const ModelParams&, const BoundParams&,          \
                                                  int, ad::Var, ad::Var, ad::Var, ad::Var);                         \
  template VarPair shared_ffn<Real>(ad::Tape<Real>&, const ModelParams&, const BoundParams&, ad::Var,               \
                                    ad::Var);                                                                       \
  template ad::Var anchor_logits<Real>(ad::Tape<Real>&, const ModelParams&, const BoundParams&, int, ad::Var,       \
                                       ad::Var);                                                                    \
  template ForwardOutput forward<Real>(ad::Tape<Real>&, const ModelParams&, const BoundParams&, ad::Var, ad::Var,   \
                                       const AnchorPairs&);

AMATCH_INSTANTIATE(float)
AMATCH_INSTANTIATE(double)
#undef AMATCH_INSTANTIATE

}  // namespace amatch
