#pragma once

#include <cstdint>
#include <random>

#include "amatch/config.hpp"
#include "amatch/types.hpp"

namespace amatch {

inline constexpr double kFrameWidth = 640.0;
inline constexpr double kFrameHeight = 480.0;

struct SyntheticProblem {
  MatchProblem problem;
  GroundTruth gt;
};

// Similarity transform about the frame center: rotation and scale drawn from
// the config ranges, translation uniform in [-max_translation, max_translation].
Affine2 random_warp(const SynthConfig& config, std::mt19937_64& rng);

// Inliers share a random unit descriptor perturbed independently per side and
// renormalized; outliers get fresh positions and descriptors. Both sides are
// shuffled, so index i of the source has no relation to index i of the target.
// Throws InvalidWarp when the warp is singular or not finite.
SyntheticProblem generate_problem(const SynthConfig& config, const Affine2& warp, std::uint64_t seed);

// Draws the warp from the same seed.
SyntheticProblem generate_problem(const SynthConfig& config, std::uint64_t seed);

}  // namespace amatch
