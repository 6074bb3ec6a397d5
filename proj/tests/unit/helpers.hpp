#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "amatch/config.hpp"
#include "amatch/model_params.hpp"
#include "amatch/synth.hpp"
#include "amatch/types.hpp"

namespace amatch::test {

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

// Small model for oracle and gradient tests: d_in = c = 8, k = 4, R = 2.
inline ModelConfig tiny_config() {
  ModelConfig c;
  c.descriptor_dim = 8;
  c.channels = 8;
  c.units = 2;
  c.anchors = 4;
  c.position_hidden = 6;
  c.ffn_expansion = 2;
  return c;
}

// Every tensor drawn from U(-scale, scale), including the zero-initialized
// residual branches, so no gradient path is structurally dead.
inline ModelParams random_params(const ModelConfig& config, std::uint64_t seed, double scale = 0.5) {
  ModelParams p = make_params(config);
  std::mt19937_64 rng(seed);
  for (auto& t : p.tensors) t.value = random_matrix(t.value.rows(), t.value.cols(), rng, -scale, scale);
  return p;
}

inline SynthConfig tiny_synth(int inliers = 6, int outliers = 2, int dim = 8) {
  SynthConfig s;
  s.n_inliers = inliers;
  s.n_outliers_source = outliers;
  s.n_outliers_target = outliers;
  s.descriptor_dim = dim;
  return s;
}

inline ImageFeatures features_from(const Matrix& xy, const Matrix& descriptors) {
  ImageFeatures f;
  for (Index i = 0; i < xy.rows(); ++i) {
    f.keypoints.positions.push_back({xy(i, 0), xy(i, 1)});
    f.keypoints.scores.push_back(1.0);
  }
  f.descriptors.values = descriptors;
  return f;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("amatch_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace amatch::test
