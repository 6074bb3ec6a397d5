#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "amatch/types.hpp"

namespace amatch {

// Binary feature file:
//   "AMFT" | u16 version = 1 | u32 n | u32 d_in |
//   n x { f32 x | f32 y | f32 score | d_in x f32 descriptor }
// all little-endian. The JSON mirror is
//   {"magic": "AMFT", "version": 1, "n": n, "d_in": d,
//    "records": [{"x": .., "y": .., "score": .., "descriptor": [..]}, ..]}
// Files carry no image extent; loaded features use the default 640 x 480.
inline constexpr std::uint16_t kFeatureVersion = 1;

std::string encode_features(const ImageFeatures& features);
ImageFeatures decode_features(std::string_view bytes);

nlohmann::json features_to_json(const ImageFeatures& features);
ImageFeatures features_from_json(const nlohmann::json& j);

// Reads either format, chosen by the leading bytes. Throws FileFormat.
ImageFeatures read_features(const std::filesystem::path& path);
void write_features(const std::filesystem::path& path, const ImageFeatures& features);

// Sidecar {"T": [[i, j], ..], "U_s": [..], "U_t": [..], "warp": [[..3], [..3]]}
// with "warp" optional.
nlohmann::json ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const nlohmann::json& j);
GroundTruth read_ground_truth(const std::filesystem::path& path);
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt);

// A problem directory holds source.amft, target.amft and gt.json.
void write_problem_dir(const std::filesystem::path& dir, const MatchProblem& problem, const GroundTruth& gt);
std::pair<MatchProblem, GroundTruth> read_problem_dir(const std::filesystem::path& dir);

}  // namespace amatch
