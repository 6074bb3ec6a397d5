#include "amatch/encoder.hpp"

#include <algorithm>

#include "amatch/error.hpp"
#include "amatch/op_counter.hpp"

namespace amatch {

Matrix position_input(const KeypointSet& keypoints, const ModelConfig& config) {
  const Index n = keypoints.count();
  require(static_cast<Index>(keypoints.scores.size()) == n, ErrorKind::kShapeMismatch,
          "keypoint scores do not match positions");
  const Index width = config.use_score_channel ? 3 : 2;
  Matrix out(n, width);
  double cx = 0.0, cy = 0.0, scale = 1.0;
  if (config.normalize_positions) {
    const auto& e = keypoints.extent;
    cx = e.x0 + 0.5 * e.width;
    cy = e.y0 + 0.5 * e.height;
    scale = 0.5 * std::max(e.width, e.height);
    require(scale > 0.0, ErrorKind::kInvalidArgument, "image extent must have positive size");
  }
  for (Index i = 0; i < n; ++i) {
    const auto& p = keypoints.positions[static_cast<std::size_t>(i)];
    out(i, 0) = (p.x - cx) / scale;
    out(i, 1) = (p.y - cy) / scale;
    if (config.use_score_channel) out(i, 2) = keypoints.scores[static_cast<std::size_t>(i)];
  }
  return out;
}

template <class Real>
ad::Var encode(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
               const ImageFeatures& features) {
  ScopedStage stage(Stage::kEncoder);
  const auto& cfg = params.config;
  require(features.descriptors.count() == features.keypoints.count(), ErrorKind::kShapeMismatch,
          "descriptor rows (" + std::to_string(features.descriptors.count()) + ") != keypoints (" +
              std::to_string(features.keypoints.count()) + ")");
  require(features.descriptors.width() == cfg.descriptor_dim, ErrorKind::kShapeMismatch,
          "descriptor width " + std::to_string(features.descriptors.width()) + " but model expects " +
              std::to_string(cfg.descriptor_dim));
  const auto& L = params.layout;
  const ad::Var desc = tape.constant(features.descriptors.values.template cast<Real>());
  const ad::Var pos = tape.constant(position_input(features.keypoints, cfg).template cast<Real>());
  const ad::Var visual = apply_linear(tape, bound, L.descriptor_proj, desc);
  const ad::Var hidden = tape.relu(apply_linear(tape, bound, L.position_hidden, pos));
  const ad::Var positional = apply_linear(tape, bound, L.position_out, hidden);
  return tape.add(visual, positional);
}

Matrix encode(const ImageFeatures& features, const ModelParams& params) {
  ad::Tape<double> tape(/*record=*/false);
  const auto bound = bind_params(tape, params);
  return tape.value(encode(tape, params, bound, features));
}

template ad::Var encode<float>(ad::Tape<float>&, const ModelParams&, const BoundParams&, const ImageFeatures&);
template ad::Var encode<double>(ad::Tape<double>&, const ModelParams&, const BoundParams&, const ImageFeatures&);

}  // namespace amatch
