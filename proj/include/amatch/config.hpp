#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace amatch {

enum class Metric { kBilinear, kCosine };
enum class Activation { kRelu, kGelu };
enum class RatioSource { kEncoded, kRaw };
enum class LabelMode { kMembership, kReprojection };

struct ModelConfig {
  int descriptor_dim = 128;  // d_in
  int channels = 128;        // c
  int units = 3;             // R
  int heads = 1;
  int anchors = 128;  // k
  int position_hidden = 32;
  int ffn_expansion = 4;
  bool use_ffn = true;
  bool use_cross = true;
  bool use_score_channel = true;
  bool normalize_positions = true;
  bool share_self_projections = true;
  bool primary_every_unit = false;
  bool mutual_anchor_filter = false;
  RatioSource ratio_source = RatioSource::kEncoded;
  Metric metric = Metric::kBilinear;
  Activation ffn_activation = Activation::kRelu;
  int sinkhorn_iters = 10;
  double match_threshold = 0.2;

  // Throws Error(kConfig) on out-of-range values.
  void check() const;
};

struct SynthConfig {
  int n_inliers = 48;
  int n_outliers_source = 16;
  int n_outliers_target = 16;
  double noise_sigma = 1.0;       // pixels
  double desc_noise_sigma = 0.3;  // expected norm of the per-side descriptor perturbation
  int descriptor_dim = 32;
  double max_rotation_deg = 30.0;
  double min_scale = 0.8;
  double max_scale = 1.2;
  double max_translation = 40.0;  // pixels

  void check() const;
};

struct TrainConfig {
  ModelConfig model;
  SynthConfig data;
  int steps = 2000;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  bool lr_linear_decay = false;
  double alpha = 250.0;
  double clip_norm = 10.0;
  int eval_interval = 200;
  int eval_problems = 32;
  double tau = 3.0;  // reprojection threshold in pixels for anchor labels
  LabelMode label_mode = LabelMode::kMembership;
  std::uint64_t seed = 7;

  void check() const;
};

// Desk-scale training setup used by the toy experiments (c=32, k=16, R=2).
TrainConfig toy_train_config();

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);
void to_json(nlohmann::json& j, const SynthConfig& c);
void from_json(const nlohmann::json& j, SynthConfig& c);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

// Parses a JSON config document on top of the defaults in `base`. Unknown keys
// and syntax errors raise Error(kConfig) with the line number.
TrainConfig parse_train_config(std::string_view text, const TrainConfig& base = {});

}  // namespace amatch
