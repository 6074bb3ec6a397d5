#include "amatch/config.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "amatch/error.hpp"

namespace amatch {
namespace {

using nlohmann::json;

template <class E, std::size_t N>
std::string enum_name(E value, const std::array<std::pair<E, const char*>, N>& table) {
  for (const auto& [e, name] : table) {
    if (e == value) return name;
  }
  return "?";
}

template <class E, std::size_t N>
E enum_value(const json& j, const char* key, const std::array<std::pair<E, const char*>, N>& table) {
  const auto s = j.get<std::string>();
  for (const auto& [e, name] : table) {
    if (s == name) return e;
  }
  throw Error(ErrorKind::kConfig, std::string("unknown value '") + s + "' for " + key);
}

constexpr std::array<std::pair<Metric, const char*>, 2> kMetrics{{{Metric::kBilinear, "bilinear"},
                                                                  {Metric::kCosine, "cosine"}}};
constexpr std::array<std::pair<Activation, const char*>, 2> kActivations{{{Activation::kRelu, "relu"},
                                                                          {Activation::kGelu, "gelu"}}};
constexpr std::array<std::pair<RatioSource, const char*>, 2> kRatioSources{{{RatioSource::kEncoded, "encoded"},
                                                                            {RatioSource::kRaw, "raw"}}};
constexpr std::array<std::pair<LabelMode, const char*>, 2> kLabelModes{{{LabelMode::kMembership, "membership"},
                                                                        {LabelMode::kReprojection, "reprojection"}}};

template <class T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

const std::set<std::string>& model_keys() {
  static const std::set<std::string> keys = {
      "descriptor_dim", "channels",          "units",         "heads",          "anchors",
      "position_hidden", "ffn_expansion",    "use_ffn",       "use_cross",      "use_score_channel",
      "normalize_positions", "share_self_projections", "primary_every_unit", "mutual_anchor_filter",
      "ratio_source",   "metric",            "ffn_activation", "sinkhorn_iters", "match_threshold"};
  return keys;
}

const std::set<std::string>& data_keys() {
  static const std::set<std::string> keys = {"n_inliers",        "n_outliers_source", "n_outliers_target",
                                             "noise_sigma",      "desc_noise_sigma",  "descriptor_dim",
                                             "max_rotation_deg", "min_scale",         "max_scale",
                                             "max_translation"};
  return keys;
}

const std::set<std::string>& train_keys() {
  static const std::set<std::string> keys = {"steps", "lr",         "beta1",         "beta2",         "eps",
                                             "lr_linear_decay", "alpha", "clip_norm", "eval_interval",
                                             "eval_problems", "tau", "label_mode", "seed"};
  return keys;
}

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

int line_of_key(std::string_view text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string_view::npos ? 0 : line_of_offset(text, pos);
}

void check_positive(int v, const char* name) {
  require(v >= 1, ErrorKind::kConfig, std::string(name) + " must be >= 1, got " + std::to_string(v));
}

}  // namespace

void ModelConfig::check() const {
  check_positive(descriptor_dim, "descriptor_dim");
  check_positive(channels, "channels");
  check_positive(units, "units");
  check_positive(heads, "heads");
  check_positive(anchors, "anchors");
  check_positive(position_hidden, "position_hidden");
  check_positive(ffn_expansion, "ffn_expansion");
  check_positive(sinkhorn_iters, "sinkhorn_iters");
  require(channels >= 2, ErrorKind::kConfig, "channels must be >= 2 for layer normalization");
  require(channels % heads == 0, ErrorKind::kConfig,
          "channels (" + std::to_string(channels) + ") must be divisible by heads (" + std::to_string(heads) + ")");
}

void SynthConfig::check() const {
  check_positive(n_inliers, "n_inliers");
  check_positive(descriptor_dim, "descriptor_dim");
  require(n_outliers_source >= 0 && n_outliers_target >= 0, ErrorKind::kConfig, "outlier counts must be >= 0");
  require(noise_sigma >= 0 && desc_noise_sigma >= 0, ErrorKind::kConfig, "noise levels must be >= 0");
  require(min_scale > 0 && max_scale >= min_scale, ErrorKind::kConfig, "need 0 < min_scale <= max_scale");
}

void TrainConfig::check() const {
  model.check();
  data.check();
  require(steps >= 0, ErrorKind::kConfig, "steps must be >= 0");
  require(lr >= 0, ErrorKind::kConfig, "lr must be >= 0");
  require(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1, ErrorKind::kConfig, "Adam betas must lie in [0,1)");
  require(eps > 0, ErrorKind::kConfig, "eps must be > 0");
  require(alpha >= 0, ErrorKind::kConfig, "alpha must be >= 0");
  require(clip_norm > 0, ErrorKind::kConfig, "clip_norm must be > 0");
  check_positive(eval_interval, "eval_interval");
  check_positive(eval_problems, "eval_problems");
  require(model.descriptor_dim == data.descriptor_dim, ErrorKind::kConfig,
          "model and data descriptor_dim differ");
}

TrainConfig toy_train_config() {
  TrainConfig cfg;
  cfg.model.descriptor_dim = 32;
  cfg.model.channels = 32;
  cfg.model.anchors = 16;
  cfg.model.units = 2;
  cfg.data.descriptor_dim = 32;
  cfg.steps = 2000;
  cfg.seed = 7;
  return cfg;
}

void to_json(json& j, const ModelConfig& c) {
  j = json{{"descriptor_dim", c.descriptor_dim},
           {"channels", c.channels},
           {"units", c.units},
           {"heads", c.heads},
           {"anchors", c.anchors},
           {"position_hidden", c.position_hidden},
           {"ffn_expansion", c.ffn_expansion},
           {"use_ffn", c.use_ffn},
           {"use_cross", c.use_cross},
           {"use_score_channel", c.use_score_channel},
           {"normalize_positions", c.normalize_positions},
           {"share_self_projections", c.share_self_projections},
           {"primary_every_unit", c.primary_every_unit},
           {"mutual_anchor_filter", c.mutual_anchor_filter},
           {"ratio_source", enum_name(c.ratio_source, kRatioSources)},
           {"metric", enum_name(c.metric, kMetrics)},
           {"ffn_activation", enum_name(c.ffn_activation, kActivations)},
           {"sinkhorn_iters", c.sinkhorn_iters},
           {"match_threshold", c.match_threshold}};
}

void from_json(const json& j, ModelConfig& c) {
  read(j, "descriptor_dim", c.descriptor_dim);
  read(j, "channels", c.channels);
  read(j, "units", c.units);
  read(j, "heads", c.heads);
  read(j, "anchors", c.anchors);
  read(j, "position_hidden", c.position_hidden);
  read(j, "ffn_expansion", c.ffn_expansion);
  read(j, "use_ffn", c.use_ffn);
  read(j, "use_cross", c.use_cross);
  read(j, "use_score_channel", c.use_score_channel);
  read(j, "normalize_positions", c.normalize_positions);
  read(j, "share_self_projections", c.share_self_projections);
  read(j, "primary_every_unit", c.primary_every_unit);
  read(j, "mutual_anchor_filter", c.mutual_anchor_filter);
  if (j.contains("ratio_source")) c.ratio_source = enum_value(j.at("ratio_source"), "ratio_source", kRatioSources);
  if (j.contains("metric")) c.metric = enum_value(j.at("metric"), "metric", kMetrics);
  if (j.contains("ffn_activation"))
    c.ffn_activation = enum_value(j.at("ffn_activation"), "ffn_activation", kActivations);
  read(j, "sinkhorn_iters", c.sinkhorn_iters);
  read(j, "match_threshold", c.match_threshold);
}

void to_json(json& j, const SynthConfig& c) {
  j = json{{"n_inliers", c.n_inliers},
           {"n_outliers_source", c.n_outliers_source},
           {"n_outliers_target", c.n_outliers_target},
           {"noise_sigma", c.noise_sigma},
           {"desc_noise_sigma", c.desc_noise_sigma},
           {"descriptor_dim", c.descriptor_dim},
           {"max_rotation_deg", c.max_rotation_deg},
           {"min_scale", c.min_scale},
           {"max_scale", c.max_scale},
           {"max_translation", c.max_translation}};
}

void from_json(const json& j, SynthConfig& c) {
  read(j, "n_inliers", c.n_inliers);
  read(j, "n_outliers_source", c.n_outliers_source);
  read(j, "n_outliers_target", c.n_outliers_target);
  read(j, "noise_sigma", c.noise_sigma);
  read(j, "desc_noise_sigma", c.desc_noise_sigma);
  read(j, "descriptor_dim", c.descriptor_dim);
  read(j, "max_rotation_deg", c.max_rotation_deg);
  read(j, "min_scale", c.min_scale);
  read(j, "max_scale", c.max_scale);
  read(j, "max_translation", c.max_translation);
}

void to_json(json& j, const TrainConfig& c) {
  json model = c.model;
  json data = c.data;
  j = json{{"steps", c.steps},
           {"lr", c.lr},
           {"beta1", c.beta1},
           {"beta2", c.beta2},
           {"eps", c.eps},
           {"lr_linear_decay", c.lr_linear_decay},
           {"alpha", c.alpha},
           {"clip_norm", c.clip_norm},
           {"eval_interval", c.eval_interval},
           {"eval_problems", c.eval_problems},
           {"tau", c.tau},
           {"label_mode", enum_name(c.label_mode, kLabelModes)},
           {"seed", c.seed}};
  j.update(model);
  j.update(data);
}

void from_json(const json& j, TrainConfig& c) {
  from_json(j, c.model);
  from_json(j, c.data);
  // One descriptor_dim key drives both the model input and the generator.
  if (j.contains("descriptor_dim")) {
    c.data.descriptor_dim = c.model.descriptor_dim;
  }
  read(j, "steps", c.steps);
  read(j, "lr", c.lr);
  read(j, "beta1", c.beta1);
  read(j, "beta2", c.beta2);
  read(j, "eps", c.eps);
  read(j, "lr_linear_decay", c.lr_linear_decay);
  read(j, "alpha", c.alpha);
  read(j, "clip_norm", c.clip_norm);
  read(j, "eval_interval", c.eval_interval);
  read(j, "eval_problems", c.eval_problems);
  read(j, "tau", c.tau);
  if (j.contains("label_mode")) c.label_mode = enum_value(j.at("label_mode"), "label_mode", kLabelModes);
  read(j, "seed", c.seed);
}

TrainConfig parse_train_config(std::string_view text, const TrainConfig& base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kConfig, "line " + std::to_string(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) +
                                        ": " + e.what());
  }
  require(doc.is_object(), ErrorKind::kConfig, "line 1: config must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    const bool known = model_keys().contains(key) || data_keys().contains(key) || train_keys().contains(key);
    require(known, ErrorKind::kConfig, "line " + std::to_string(line_of_key(text, key)) + ": unknown key '" + key + "'");
  }
  TrainConfig cfg = base;
  for (const auto& [key, value] : doc.items()) {
    try {
      json single = json::object({{key, value}});
      from_json(single, cfg);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kConfig,
                  "line " + std::to_string(line_of_key(text, key)) + ": bad value for '" + key + "': " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::kConfig, "line " + std::to_string(line_of_key(text, key)) + ": " + e.detail());
    }
  }
  try {
    cfg.check();
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, e.detail());
  }
  return cfg;
}

}  // namespace amatch
