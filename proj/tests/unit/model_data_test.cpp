#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "amatch/anchors.hpp"
#include "amatch/encoder.hpp"
#include "amatch/error.hpp"
#include "amatch/pipeline.hpp"
#include "helpers.hpp"

namespace amatch {
namespace {

using test::random_matrix;

MatchProblem small_problem(Index n, Index m, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MatchProblem p;
  p.source = test::features_from(random_matrix(n, 2, rng, 0.0, 400.0), random_matrix(n, d, rng));
  p.target = test::features_from(random_matrix(m, 2, rng, 0.0, 400.0), random_matrix(m, d, rng));
  return p;
}

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kIo;
}

TEST(Validate, Examples) {
  EXPECT_NO_THROW(validate(small_problem(3, 3, 4, 1)));

  auto empty = small_problem(3, 3, 4, 1);
  empty.source = {};
  EXPECT_EQ(kind_of([&] { validate(empty); }), ErrorKind::kEmptySide);

  auto nan = small_problem(3, 3, 4, 1);
  nan.target.descriptors.values(1, 2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(kind_of([&] { validate(nan); }), ErrorKind::kNonFiniteValue);

  auto widths = small_problem(3, 3, 4, 1);
  widths.target.descriptors.values = Matrix::Zero(3, 5);
  EXPECT_EQ(kind_of([&] { validate(widths); }), ErrorKind::kShapeMismatch);

  auto rows = small_problem(3, 3, 4, 1);
  rows.source.keypoints.scores.pop_back();
  EXPECT_EQ(kind_of([&] { validate(rows); }), ErrorKind::kShapeMismatch);

  auto score = small_problem(3, 3, 4, 1);
  score.source.keypoints.scores[0] = 1.5;
  EXPECT_THROW(validate(score), Error);
}

TEST(Validate, GroundTruthPartition) {
  GroundTruth gt;
  gt.matches = {{0, 1}, {1, 0}};
  gt.unmatched_source = {2};
  gt.unmatched_target = {2};
  EXPECT_NO_THROW(validate(gt, 3, 3));

  auto twice = gt;
  twice.unmatched_source.push_back(0);
  EXPECT_THROW(validate(twice, 3, 3), Error);

  auto missing = gt;
  missing.unmatched_target.clear();
  EXPECT_THROW(validate(missing, 3, 3), Error);

  auto out_of_range = gt;
  out_of_range.matches.push_back({5, 5});
  EXPECT_THROW(validate(out_of_range, 3, 3), Error);
}

// Valid random problems never trip shape errors downstream.
TEST(Validate, FuzzedProblemsRunThePipeline) {
  auto cfg = test::tiny_config();
  const auto params = test::random_params(cfg, 3);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> size(2, 12);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = small_problem(size(rng), size(rng), cfg.descriptor_dim, 1000 + static_cast<std::uint64_t>(trial));
    ASSERT_NO_THROW(validate(p));
    const auto r = match(params, p, 0.2);
    ASSERT_EQ(r.plan.rows(), p.n() + 1);
    ASSERT_EQ(r.plan.cols(), p.m() + 1);
    ASSERT_TRUE(r.plan.allFinite());
  }
}

TEST(Encoder, ZeroDescriptorsAndZeroMlp) {
  auto cfg = test::tiny_config();
  auto params = make_params(cfg);  // all zero
  const auto p = small_problem(5, 4, cfg.descriptor_dim, 2);
  auto f = p.source;
  f.descriptors.values.setZero();
  EXPECT_TRUE(encode(f, params).isZero());
}

TEST(Encoder, PositionSeparatesIdenticalDescriptors) {
  auto cfg = test::tiny_config();
  const auto params = init_params(cfg, 4);
  Matrix xy(2, 2);
  xy << 100, 100, 500, 300;
  const Matrix desc = Matrix::Ones(2, cfg.descriptor_dim) / std::sqrt(double(cfg.descriptor_dim));
  const Matrix F = encode(test::features_from(xy, desc), params);
  EXPECT_GT((F.row(0) - F.row(1)).norm(), 1e-3);
}

TEST(Encoder, IdentityProjection) {
  auto cfg = test::tiny_config();
  auto params = make_params(cfg);
  params.at(params.layout.descriptor_proj.weight) = Matrix::Identity(cfg.channels, cfg.channels);
  const auto p = small_problem(6, 3, cfg.descriptor_dim, 5);
  EXPECT_EQ(encode(p.source, params), p.source.descriptors.values);
}

TEST(Encoder, RigidShiftOfExtentIsInvisible) {
  auto cfg = test::tiny_config();
  const auto params = test::random_params(cfg, 6);
  const auto p = small_problem(7, 3, cfg.descriptor_dim, 7);
  auto shifted = p.source;
  shifted.keypoints.extent.x0 += 64.0;
  shifted.keypoints.extent.y0 -= 32.0;
  for (auto& q : shifted.keypoints.positions) {
    q.x += 64.0;
    q.y -= 32.0;
  }
  EXPECT_TRUE(encode(shifted, params).isApprox(encode(p.source, params), 1e-12));
}

TEST(Encoder, Pure) {
  auto cfg = test::tiny_config();
  const auto params = test::random_params(cfg, 8);
  const auto p = small_problem(9, 3, cfg.descriptor_dim, 8);
  EXPECT_EQ(encode(p.source, params), encode(p.source, params));
}

TEST(Encoder, WidthMismatch) {
  auto cfg = test::tiny_config();
  const auto params = init_params(cfg, 1);
  const auto p = small_problem(4, 4, cfg.descriptor_dim + 1, 9);
  EXPECT_EQ(kind_of([&] { encode(p.source, params); }), ErrorKind::kShapeMismatch);
}

TEST(RatioScores, Examples) {
  Matrix fs(1, 2), ft(2, 2);
  fs << 1, 0;
  ft << 1, 0, 0, 1;
  const auto c = nn_ratio_scores<double>(fs, ft);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], (Candidate{0, 0, 0.0}));

  std::mt19937_64 rng(11);
  const Matrix many = random_matrix(5, 3, rng);
  const Matrix same = Matrix::Ones(4, 3);
  for (const auto& cand : nn_ratio_scores<double>(many, same)) {
    EXPECT_DOUBLE_EQ(cand.ratio, 1.0);
    EXPECT_EQ(cand.target, 0);  // ties go to the lower index
  }
}

TEST(RatioScores, MatchesBruteForce) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix fs = random_matrix(3, 5, rng);
    const Matrix ft = random_matrix(4, 5, rng);
    const auto got = nn_ratio_scores<double>(fs, ft);
    ASSERT_EQ(got.size(), 3u);
    for (Index i = 0; i < 3; ++i) {
      std::vector<std::pair<double, Index>> d;
      for (Index j = 0; j < 4; ++j) d.push_back({(fs.row(i) - ft.row(j)).norm(), j});
      std::sort(d.begin(), d.end());
      EXPECT_EQ(got[static_cast<std::size_t>(i)].target, d[0].second);
      EXPECT_NEAR(got[static_cast<std::size_t>(i)].ratio, d[0].first / d[1].first, 1e-12);
    }
  }
}

TEST(RatioScores, TooFewTargets) {
  EXPECT_EQ(kind_of([] { nn_ratio_scores<double>(Matrix::Ones(3, 2), Matrix::Ones(1, 2)); }),
            ErrorKind::kTooFewTargets);
}

TEST(RatioScores, MutualFilterKeepsOnlyMutualPairs) {
  std::mt19937_64 rng(13);
  const Matrix fs = random_matrix(10, 4, rng);
  const Matrix ft = random_matrix(6, 4, rng);
  for (const auto& c : nn_ratio_scores<double>(fs, ft, true)) {
    Index back = 0;
    (fs.rowwise() - ft.row(c.target)).rowwise().squaredNorm().minCoeff(&back);
    EXPECT_EQ(back, c.source);
  }
}

TEST(SelectAnchors, Examples) {
  Matrix fs(1, 2), ft(2, 2);
  fs << 1, 0;
  ft << 1, 0, 0, 1;
  const auto cands = nn_ratio_scores<double>(fs, ft);
  const auto one = select_anchors<double>(cands, 1, fs, ft);
  ASSERT_EQ(one.k(), 1);
  EXPECT_EQ(one.source_indices[0], 0);
  EXPECT_EQ(one.target_indices[0], 0);
  EXPECT_FALSE(one.clamped);
  EXPECT_EQ(one.anchors_source, fs);
  EXPECT_EQ(one.anchors_target, ft.topRows(1));

  const auto clamped = select_anchors<double>(cands, 5, fs, ft);
  EXPECT_EQ(clamped.k(), 1);
  EXPECT_EQ(clamped.requested_k, 5);
  EXPECT_TRUE(clamped.clamped);

  EXPECT_EQ(kind_of([&] { select_anchors<double>({}, 3, fs, ft); }), ErrorKind::kNoCandidates);
  EXPECT_EQ(kind_of([&] { select_anchors<double>(cands, 0, fs, ft); }), ErrorKind::kInvalidArgument);
}

TEST(SelectAnchors, FourSmallestOfSixteen) {
  std::vector<Candidate> cands;
  std::mt19937_64 rng(14);
  std::vector<double> ratios;
  for (int i = 0; i < 16; ++i) ratios.push_back(0.05 + 0.05 * i);
  std::shuffle(ratios.begin(), ratios.end(), rng);
  for (Index i = 0; i < 16; ++i) cands.push_back({i, i, ratios[static_cast<std::size_t>(i)]});
  const Matrix f = random_matrix(16, 3, rng);
  const auto a = select_anchors<double>(cands, 4, f, f);
  std::sort(ratios.begin(), ratios.end());
  EXPECT_EQ(a.ratios, std::vector<double>(ratios.begin(), ratios.begin() + 4));
}

TEST(SelectAnchors, SmallestUniqueAndEquivariant) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix fs = random_matrix(20, 4, rng);
    const Matrix ft = random_matrix(12, 4, rng);
    const auto cands = nn_ratio_scores<double>(fs, ft);
    const auto a = select_anchors<double>(cands, 6, fs, ft);

    // Ratios nondecreasing and equal to a greedy pass over the full sort.
    auto sorted = cands;
    std::sort(sorted.begin(), sorted.end(), [](auto& x, auto& y) { return x.ratio < y.ratio; });
    std::vector<double> expect;
    std::set<Index> seen;
    for (const auto& c : sorted) {
      if (expect.size() == 6) break;
      if (seen.insert(c.target).second) expect.push_back(c.ratio);
    }
    ASSERT_EQ(a.ratios.size(), expect.size());
    ASSERT_TRUE(std::is_sorted(a.ratios.begin(), a.ratios.end()));
    for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_DOUBLE_EQ(a.ratios[i], expect[i]);
    EXPECT_EQ(std::set<Index>(a.target_indices.begin(), a.target_indices.end()).size(), a.target_indices.size());

    // Relabel the sources and select again.
    std::vector<Index> perm(20);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix permuted(20, 4);
    for (Index i = 0; i < 20; ++i) permuted.row(perm[static_cast<std::size_t>(i)]) = fs.row(i);
    const auto b = select_anchors<double>(nn_ratio_scores<double>(permuted, ft), 6, permuted, ft);
    ASSERT_EQ(b.k(), a.k());
    for (Index i = 0; i < a.k(); ++i) {
      EXPECT_EQ(b.source_indices[static_cast<std::size_t>(i)],
                perm[static_cast<std::size_t>(a.source_indices[static_cast<std::size_t>(i)])]);
      EXPECT_EQ(b.target_indices[static_cast<std::size_t>(i)], a.target_indices[static_cast<std::size_t>(i)]);
    }
  }
}

}  // namespace
}  // namespace amatch
