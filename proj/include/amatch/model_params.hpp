#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amatch/config.hpp"
#include "amatch/types.hpp"

namespace amatch {

// Slot indices into ModelParams::tensors. A bias slot of -1 means no bias.
struct LinearSlots {
  int weight = -1;
  int bias = -1;
};

struct AttentionSlots {
  LinearSlots query;
  LinearSlots key;
  LinearSlots value;
  LinearSlots out;  // LP(.) applied to the aggregated message
};

struct UnitSlots {
  AttentionSlots self_source;
  AttentionSlots self_target;  // same slots as self_source when projections are shared
  AttentionSlots cross;
  LinearSlots anchor_head;  // c -> 1
};

struct FfnSlots {
  int ln_gain = -1;
  int ln_bias = -1;
  LinearSlots hidden;  // c -> expansion * c
  LinearSlots out;     // expansion * c -> c
};

struct ModelLayout {
  LinearSlots descriptor_proj;  // d_in -> c
  LinearSlots position_hidden;  // (x, y[, score]) -> position_hidden
  LinearSlots position_out;     // position_hidden -> c
  std::vector<UnitSlots> units;
  std::vector<AttentionSlots> primary;  // one, or one per unit with primary_every_unit
  bool has_ffn = false;
  FfnSlots ffn;  // a single slot set used by both image branches
  int metric = -1;
  int dustbin = -1;
};

struct NamedTensor {
  std::string name;
  Matrix value;
};

// Every learnable matrix of the model in a fixed, documented order.
//
// The order is the order in which make_layout() registers slots:
// encoder (descriptor projection, position MLP), then each unit (self
// attention, optional unshared target self attention, cross attention,
// anchor head), then anchor-primary attention, FFN, metric W and the dustbin
// score. Biases are 1 x width row vectors.
struct ModelParams {
  ModelConfig config;
  ModelLayout layout;
  std::vector<NamedTensor> tensors;

  Matrix& at(int slot) { return tensors.at(static_cast<std::size_t>(slot)).value; }
  const Matrix& at(int slot) const { return tensors.at(static_cast<std::size_t>(slot)).value; }
  std::size_t scalar_count() const;
  bool all_finite() const;

  // Zeroes every LP output projection and the FFN output layer.
  void zero_residual_branches();
};

// Builds the slot layout and zero-filled tensors of the right shapes.
ModelParams make_params(const ModelConfig& config);

// Xavier-uniform weights, zero biases, unit layer-norm gain, zero LP and FFN
// output layers (identity map on features), dustbin score 1.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

// Per-slot conversion for reduced-precision evaluation.
std::vector<MatrixF> to_float(const ModelParams& params);

}  // namespace amatch
