#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amatch/adam.hpp"
#include "amatch/config.hpp"
#include "amatch/model_params.hpp"

namespace amatch {

// Checkpoint file, little-endian:
//   "AMCK" | u16 version | u32 L | L bytes of JSON {"model": {..}, "train": {..}}
//   u32 tensor count | per tensor: u16 name length, name, u32 rows, u32 cols,
//                      rows x cols f32 (row-major)
//   optional training state:
//   "AMTS" | u64 step | u64 Adam step | per tensor: f64 values, f64 Adam m, f64 Adam v
// Tensors follow the ModelParams slot order. The training state keeps exact
// double values so resumed runs continue bit-for-bit.
inline constexpr std::uint16_t kCheckpointVersion = 1;

struct ResumeState {
  std::int64_t step = 0;
  std::vector<Matrix> params;
  AdamState adam;
};

struct Checkpoint {
  ModelParams params;                // values rounded through f32
  std::optional<TrainConfig> train;  // echoed by the trainer
  std::optional<ResumeState> resume;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::string_view bytes);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

// Parameters with full precision when a training state is present.
ModelParams exact_params(const Checkpoint& ckpt);

}  // namespace amatch
