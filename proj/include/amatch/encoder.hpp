#pragma once

#include "amatch/bound_params.hpp"
#include "amatch/types.hpp"

namespace amatch {

// n x 3 (or n x 2 without the score channel) positional input. With
// normalization, coordinates are centered on the extent and divided by half
// of its larger side.
Matrix position_input(const KeypointSet& keypoints, const ModelConfig& config);

// F = linear(descriptor) + MLP(x, y, score), width c.
template <class Real>
ad::Var encode(ad::Tape<Real>& tape, const ModelParams& params, const BoundParams& bound,
               const ImageFeatures& features);

// Tape-free evaluation in double precision.
Matrix encode(const ImageFeatures& features, const ModelParams& params);

}  // namespace amatch
