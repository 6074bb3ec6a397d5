#include "amatch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "amatch/error.hpp"

namespace amatch {
namespace {

Eigen::RowVectorXd random_unit(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::RowVectorXd v(d);
  do {
    for (Index i = 0; i < d; ++i) v(i) = normal(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

// Isotropic noise whose expected norm is `sigma` (per-component sigma / sqrt(d)).
Eigen::RowVectorXd perturb(const Eigen::RowVectorXd& base, double sigma, std::mt19937_64& rng) {
  if (sigma == 0.0) return base;
  std::normal_distribution<double> normal(0.0, sigma / std::sqrt(static_cast<double>(base.size())));
  Eigen::RowVectorXd v = base;
  for (Index i = 0; i < v.size(); ++i) v(i) += normal(rng);
  const double norm = v.norm();
  return norm > 0.0 ? Eigen::RowVectorXd(v / norm) : base;
}

Point2 random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(0.0, kFrameWidth);
  std::uniform_real_distribution<double> uy(0.0, kFrameHeight);
  const double x = ux(rng);
  const double y = uy(rng);
  return {x, y};
}

struct Draft {
  Point2 position;
  Eigen::RowVectorXd descriptor;
  Index partner = -1;  // draft index on the other side, -1 for outliers
};

ImageFeatures assemble(const std::vector<Draft>& drafts, const std::vector<Index>& order, Index d) {
  ImageFeatures f;
  f.keypoints.extent = {0.0, 0.0, kFrameWidth, kFrameHeight};
  f.descriptors.values.resize(static_cast<Index>(drafts.size()), d);
  for (std::size_t slot = 0; slot < order.size(); ++slot) {
    const Draft& dr = drafts[static_cast<std::size_t>(order[slot])];
    f.keypoints.positions.push_back(dr.position);
    f.keypoints.scores.push_back(1.0);
    f.descriptors.values.row(static_cast<Index>(slot)) = dr.descriptor;
  }
  return f;
}

}  // namespace

Affine2 random_warp(const SynthConfig& config, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rot(-config.max_rotation_deg, config.max_rotation_deg);
  std::uniform_real_distribution<double> scale(config.min_scale, config.max_scale);
  std::uniform_real_distribution<double> shift(-config.max_translation, config.max_translation);
  const double theta = rot(rng) * std::numbers::pi / 180.0;
  const double s = scale(rng);
  const double tx = shift(rng);
  const double ty = shift(rng);
  const double cx = 0.5 * kFrameWidth;
  const double cy = 0.5 * kFrameHeight;
  const double a = s * std::cos(theta);
  const double b = s * std::sin(theta);
  Affine2 w;
  // p' = c + s R (p - c) + t
  w.m << a, -b, cx - a * cx + b * cy + tx, b, a, cy - b * cx - a * cy + ty;
  return w;
}

SyntheticProblem generate_problem(const SynthConfig& config, const Affine2& warp, std::uint64_t seed) {
  config.check();
  const double det = warp.determinant();
  require(warp.m.allFinite() && std::abs(det) > 1e-12, ErrorKind::kInvalidWarp,
          "warp is singular or not finite (det = " + std::to_string(det) + ")");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> pixel_noise(0.0, 1.0);
  const Index d = config.descriptor_dim;
  const auto n_in = static_cast<std::size_t>(config.n_inliers);

  std::vector<Draft> src;
  std::vector<Draft> dst;
  for (std::size_t i = 0; i < n_in; ++i) {
    const Point2 p = random_point(rng);
    Point2 q = warp.apply(p);
    q.x += config.noise_sigma * pixel_noise(rng);
    q.y += config.noise_sigma * pixel_noise(rng);
    const Eigen::RowVectorXd shared = random_unit(d, rng);
    src.push_back({p, perturb(shared, config.desc_noise_sigma, rng), static_cast<Index>(i)});
    dst.push_back({q, perturb(shared, config.desc_noise_sigma, rng), static_cast<Index>(i)});
  }
  for (int i = 0; i < config.n_outliers_source; ++i) src.push_back({random_point(rng), random_unit(d, rng)});
  for (int i = 0; i < config.n_outliers_target; ++i) dst.push_back({random_point(rng), random_unit(d, rng)});

  std::vector<Index> src_order(src.size());
  std::vector<Index> dst_order(dst.size());
  std::iota(src_order.begin(), src_order.end(), Index{0});
  std::iota(dst_order.begin(), dst_order.end(), Index{0});
  std::shuffle(src_order.begin(), src_order.end(), rng);
  std::shuffle(dst_order.begin(), dst_order.end(), rng);

  SyntheticProblem out;
  out.problem.source = assemble(src, src_order, d);
  out.problem.target = assemble(dst, dst_order, d);

  std::vector<Index> dst_slot(dst.size());
  for (std::size_t slot = 0; slot < dst_order.size(); ++slot) {
    dst_slot[static_cast<std::size_t>(dst_order[slot])] = static_cast<Index>(slot);
  }
  for (std::size_t slot = 0; slot < src_order.size(); ++slot) {
    const Draft& dr = src[static_cast<std::size_t>(src_order[slot])];
    if (dr.partner >= 0) {
      out.gt.matches.emplace_back(static_cast<Index>(slot), dst_slot[static_cast<std::size_t>(dr.partner)]);
    } else {
      out.gt.unmatched_source.push_back(static_cast<Index>(slot));
    }
  }
  for (std::size_t slot = 0; slot < dst_order.size(); ++slot) {
    if (dst[static_cast<std::size_t>(dst_order[slot])].partner < 0) {
      out.gt.unmatched_target.push_back(static_cast<Index>(slot));
    }
  }
  out.gt.warp = warp;
  return out;
}

SyntheticProblem generate_problem(const SynthConfig& config, std::uint64_t seed) {
  std::seed_seq seq{seed, std::uint64_t{0x77a7}};
  std::mt19937_64 rng(seq);
  const Affine2 warp = random_warp(config, rng);
  return generate_problem(config, warp, seed);
}

}  // namespace amatch
