#include "amatch/model_params.hpp"

#include <cmath>
#include <random>

namespace amatch {
namespace {

class LayoutBuilder {
 public:
  explicit LayoutBuilder(std::vector<NamedTensor>& tensors) : tensors_(tensors) {}

  int add(std::string name, Index rows, Index cols) {
    tensors_.push_back({std::move(name), Matrix::Zero(rows, cols)});
    return static_cast<int>(tensors_.size() - 1);
  }

  LinearSlots linear(const std::string& name, Index in, Index out, bool bias = true) {
    LinearSlots s;
    s.weight = add(name + ".weight", in, out);
    if (bias) s.bias = add(name + ".bias", 1, out);
    return s;
  }

  AttentionSlots attention(const std::string& name, Index c) {
    return {linear(name + ".query", c, c), linear(name + ".key", c, c), linear(name + ".value", c, c),
            linear(name + ".out", c, c)};
  }

 private:
  std::vector<NamedTensor>& tensors_;
};

void xavier(Matrix& w, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  std::uniform_real_distribution<double> dist(-a, a);
  for (Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
}

void for_each_out_projection(const ModelLayout& layout, auto&& fn) {
  for (const auto& u : layout.units) {
    fn(u.self_source.out);
    fn(u.self_target.out);
    fn(u.cross.out);
  }
  for (const auto& p : layout.primary) fn(p.out);
  if (layout.has_ffn) fn(layout.ffn.out);
}

}  // namespace

std::size_t ModelParams::scalar_count() const {
  std::size_t total = 0;
  for (const auto& t : tensors) total += static_cast<std::size_t>(t.value.size());
  return total;
}

bool ModelParams::all_finite() const {
  for (const auto& t : tensors) {
    if (!t.value.allFinite()) return false;
  }
  return true;
}

void ModelParams::zero_residual_branches() {
  for_each_out_projection(layout, [this](const LinearSlots& s) {
    at(s.weight).setZero();
    if (s.bias >= 0) at(s.bias).setZero();
  });
}

ModelParams make_params(const ModelConfig& config) {
  config.check();
  ModelParams p;
  p.config = config;
  LayoutBuilder b(p.tensors);
  const Index c = config.channels;
  const Index pos_in = config.use_score_channel ? 3 : 2;

  auto& L = p.layout;
  L.descriptor_proj = b.linear("encoder.descriptor", config.descriptor_dim, c);
  L.position_hidden = b.linear("encoder.position.hidden", pos_in, config.position_hidden);
  L.position_out = b.linear("encoder.position.out", config.position_hidden, c);

  for (int r = 0; r < config.units; ++r) {
    const std::string prefix = "unit" + std::to_string(r);
    UnitSlots u;
    u.self_source = b.attention(prefix + ".self", c);
    u.self_target = config.share_self_projections ? u.self_source : b.attention(prefix + ".self_target", c);
    u.cross = b.attention(prefix + ".cross", c);
    u.anchor_head = b.linear(prefix + ".anchor_head", c, 1);
    L.units.push_back(u);
  }
  const int primary_count = config.primary_every_unit ? config.units : 1;
  for (int r = 0; r < primary_count; ++r) {
    L.primary.push_back(b.attention("primary" + std::to_string(r), c));
  }
  L.has_ffn = config.use_ffn;
  if (L.has_ffn) {
    L.ffn.ln_gain = b.add("ffn.norm.gain", 1, c);
    L.ffn.ln_bias = b.add("ffn.norm.bias", 1, c);
    L.ffn.hidden = b.linear("ffn.hidden", c, c * config.ffn_expansion);
    L.ffn.out = b.linear("ffn.out", c * config.ffn_expansion, c);
  }
  L.metric = b.add("metric.W", c, c);
  L.dustbin = b.add("dustbin", 1, 1);
  return p;
}

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
  ModelParams p = make_params(config);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < p.tensors.size(); ++i) {
    const int slot = static_cast<int>(i);
    const bool skip = p.tensors[i].name.ends_with(".bias") || slot == p.layout.dustbin ||
                      (p.layout.has_ffn && slot == p.layout.ffn.ln_gain);
    if (!skip) xavier(p.tensors[i].value, rng);
  }
  if (p.layout.has_ffn) p.at(p.layout.ffn.ln_gain).setOnes();
  p.at(p.layout.dustbin)(0, 0) = 1.0;
  p.zero_residual_branches();
  return p;
}

std::vector<MatrixF> to_float(const ModelParams& params) {
  std::vector<MatrixF> out;
  out.reserve(params.tensors.size());
  for (const auto& t : params.tensors) out.push_back(t.value.cast<float>());
  return out;
}

}  // namespace amatch
