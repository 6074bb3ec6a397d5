#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "amatch/error.hpp"
#include "amatch/grad_check.hpp"
#include "amatch/tape.hpp"
#include "helpers.hpp"

namespace amatch::ad {
namespace {

using test::random_matrix;

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

TEST(Matmul, Examples) {
  Tape<double> t;
  std::mt19937_64 rng(1);
  const Matrix M = random_matrix(2, 3, rng);
  EXPECT_EQ(t.value(t.matmul(t.constant(Matrix::Identity(2, 2)), t.constant(M))), M);
  EXPECT_DOUBLE_EQ(t.value(t.matmul(t.constant(mat({{1, 2}})), t.constant(mat({{3}, {4}}))))(0, 0), 11.0);
  EXPECT_TRUE(t.value(t.matmul(t.constant(Matrix::Zero(4, 2)), t.constant(M))).isZero());
}

TEST(Matmul, ShapeMismatch) {
  Tape<double> t;
  try {
    t.matmul(t.constant(Matrix::Zero(2, 3)), t.constant(Matrix::Zero(2, 3)));
    FAIL() << "expected ShapeMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShapeMismatch);
  }
}

TEST(Softmax, Examples) {
  Tape<double> t;
  const Matrix half = t.value(t.softmax_rows(t.constant(mat({{0, 0}}))));
  EXPECT_DOUBLE_EQ(half(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(half(0, 1), 0.5);

  const Matrix thirds = t.value(t.softmax_rows(t.constant(mat({{std::log(2.0), 0}}))));
  EXPECT_NEAR(thirds(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(thirds(0, 1), 1.0 / 3.0, 1e-15);

  const Matrix big = t.value(t.softmax_rows(t.constant(mat({{1000, 0}}))));
  EXPECT_NEAR(big(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(big(0, 1), 0.0, 1e-12);
}

TEST(Softmax, RowsSumToOne) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> size(1, 64);
  for (int trial = 0; trial < 200; ++trial) {
    Tape<double> t(false);
    const Matrix x = random_matrix(size(rng), size(rng), rng, -50.0, 50.0);
    const Matrix s = t.value(t.softmax_rows(t.constant(x)));
    ASSERT_TRUE((s.array() >= 0.0).all());
    for (Index i = 0; i < s.rows(); ++i) ASSERT_NEAR(s.row(i).sum(), 1.0, 1e-12);
  }
}

TEST(LayerNorm, Examples) {
  Tape<double> t;
  const Var gain = t.constant(Matrix::Ones(1, 3));
  const Var zero = t.constant(Matrix::Zero(1, 3));
  EXPECT_TRUE(t.value(t.layer_norm(t.constant(mat({{4, 4, 4}})), gain, zero)).isZero());

  const Matrix r = t.value(t.layer_norm(t.constant(mat({{1, -1}})), t.constant(Matrix::Ones(1, 2)),
                                        t.constant(Matrix::Zero(1, 2))));
  const double expect = 1.0 / std::sqrt(1.0 + kLayerNormEps);
  EXPECT_NEAR(r(0, 0), expect, 1e-15);
  EXPECT_NEAR(r(0, 1), -expect, 1e-15);
  EXPECT_NEAR(r(0, 0), 1.0, 1e-5);

  const Matrix bias = mat({{0.5, -2, 3}});
  const Matrix b = t.value(t.layer_norm(t.constant(mat({{1, 7, -3}})), zero, t.constant(bias)));
  EXPECT_EQ(b, bias);
}

TEST(LayerNorm, DegenerateWidth) {
  Tape<double> t;
  try {
    t.layer_norm(t.constant(Matrix::Ones(2, 1)), t.constant(Matrix::Ones(1, 1)), t.constant(Matrix::Zero(1, 1)));
    FAIL() << "expected DegenerateWidth";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateWidth);
  }
}

TEST(Linear, Examples) {
  Tape<double> t;
  std::mt19937_64 rng(3);
  const Matrix M = random_matrix(3, 2, rng);
  EXPECT_EQ(t.value(t.linear(t.constant(M), t.constant(Matrix::Identity(2, 2)))), M);
  const Matrix r = t.value(t.linear(t.constant(mat({{1, 0}})), t.constant(mat({{2, 0}, {0, 3}})),
                                    t.constant(mat({{1, 1}}))));
  EXPECT_EQ(r, mat({{3, 1}}));
  EXPECT_TRUE(
      t.value(t.linear(t.constant(M), t.constant(Matrix::Zero(2, 4)), t.constant(Matrix::Zero(1, 4)))).isZero());
}

TEST(Relu, Examples) {
  Tape<double> t;
  EXPECT_EQ(t.value(t.relu(t.constant(mat({{-1, 2}})))), mat({{0, 2}}));
  EXPECT_TRUE(t.value(t.relu(t.constant(Matrix::Zero(2, 2)))).isZero());
  const Matrix pos = mat({{0.1, 5}, {3, 2}});
  EXPECT_EQ(t.value(t.relu(t.constant(pos))), pos);
}

TEST(Backward, Examples) {
  std::mt19937_64 rng(4);
  {
    Tape<double> t;
    const Var m = t.parameter(random_matrix(3, 4, rng));
    EXPECT_EQ(t.backward(t.sum(m)).of(m), Matrix::Ones(3, 4));
  }
  {
    Tape<double> t;
    const Matrix A = random_matrix(2, 3, rng);
    const Matrix B = random_matrix(3, 4, rng);
    const Var a = t.parameter(A);
    const Var b = t.parameter(B);
    const auto g = t.backward(t.sum(t.matmul(a, b)));
    EXPECT_TRUE(g.of(a).isApprox(Matrix::Ones(2, 4) * B.transpose(), 1e-14));
    EXPECT_TRUE(g.of(b).isApprox(A.transpose() * Matrix::Ones(2, 4), 1e-14));
    // Finite-difference cross-check of the same gradients.
    const auto fd = grad_check(
        [&](Tape<double>& tape, Var theta) { return tape.sum(tape.matmul(theta, tape.constant(B))); }, A);
    EXPECT_LT(fd.max_relative_error, 1e-8);
  }
  {
    Tape<double> t;
    const Var used = t.parameter(random_matrix(2, 2, rng));
    const Var unused = t.parameter(random_matrix(3, 1, rng));
    const auto g = t.backward(t.sum(used));
    EXPECT_EQ(g.of(unused), Matrix::Zero(3, 1));
  }
}

TEST(Backward, NotScalar) {
  Tape<double> t;
  const Var m = t.parameter(Matrix::Ones(2, 2));
  try {
    t.backward(t.relu(m));
    FAIL() << "expected NotScalar";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotScalar);
  }
}

TEST(Backward, FanOutAccumulates) {
  Tape<double> t;
  const Var x = t.parameter(Matrix::Constant(1, 1, 3.0));
  const auto g = t.backward(t.sum(t.add(t.hadamard(x, x), x)));  // x^2 + x
  EXPECT_DOUBLE_EQ(g.of(x)(0, 0), 7.0);
}

TEST(Backward, Deterministic) {
  std::mt19937_64 rng(5);
  const Matrix A = random_matrix(6, 5, rng);
  const Matrix B = random_matrix(5, 6, rng);
  auto run = [&] {
    Tape<double> t;
    const Var a = t.parameter(A);
    const Var s = t.softmax_rows(t.matmul(a, t.constant(B)));
    const Var ln = t.layer_norm(s, t.constant(Matrix::Ones(1, 6)), t.constant(Matrix::Zero(1, 6)));
    return t.backward(t.sum(t.hadamard(ln, ln))).of(a);
  };
  const Matrix g1 = run();
  const Matrix g2 = run();
  EXPECT_EQ(0, std::memcmp(g1.data(), g2.data(), sizeof(double) * static_cast<std::size_t>(g1.size())));
}

TEST(GradCheck, QuadraticAndSoftmaxChain) {
  std::mt19937_64 rng(6);
  const Matrix theta = random_matrix(3, 4, rng);
  const auto quad =
      grad_check([](Tape<double>& t, Var x) { return t.sum(t.hadamard(x, x)); }, theta, 1e-5);
  EXPECT_LT(quad.max_relative_error, 1e-8);

  const Matrix w = random_matrix(4, 4, rng);
  const auto chain = grad_check(
      [&](Tape<double>& t, Var x) {
        const Var s = t.softmax_rows(t.matmul(x, t.constant(w)));
        return t.sum(t.hadamard(s, t.constant(w.topRows(3))));
      },
      theta);
  EXPECT_LT(chain.max_relative_error, 1e-6);
}

// Each primitive against central differences on random inputs.
struct PrimitiveCase {
  const char* name;
  Index rows, cols;
  ScalarFunction f;
};

class PrimitiveGradient : public ::testing::TestWithParam<int> {};

std::vector<PrimitiveCase> primitive_cases() {
  static const Matrix B = [] {
    std::mt19937_64 rng(70);
    return random_matrix(5, 4, rng);
  }();
  static const Matrix W = [] {
    std::mt19937_64 rng(71);
    return random_matrix(4, 6, rng);
  }();
  // Weighted sum so every output entry carries a distinct upstream gradient.
  auto weigh = [](Tape<double>& t, Var y) {
    const auto& v = t.value(y);
    Matrix c(v.rows(), v.cols());
    for (Index i = 0; i < c.size(); ++i) c.data()[i] = std::sin(1.0 + static_cast<double>(i));
    return t.sum(t.hadamard(y, t.constant(c)));
  };
  const std::vector<Index> rows{0, 2, 2, 4};
  const std::vector<std::pair<Index, Index>> entries{{0, 1}, {3, 2}, {4, 4}, {0, 1}};
  static const std::vector<double> labels{1, 0, 1, 1, 0};
  return {
      {"matmul", 3, 5, [=](Tape<double>& t, Var x) { return weigh(t, t.matmul(x, t.constant(B))); }},
      {"matmul_transposed", 3, 4,
       [=](Tape<double>& t, Var x) { return weigh(t, t.matmul_transposed(x, t.constant(B))); }},
      {"linear", 4, 3,
       [=](Tape<double>& t, Var x) {
         return weigh(t, t.linear(t.constant(B.topRows(2)), x, t.constant(Matrix::Ones(1, 3))));
       }},
      {"linear_bias", 1, 6,
       [=](Tape<double>& t, Var x) { return weigh(t, t.linear(t.constant(B), t.constant(W), x)); }},
      {"add_sub_scale", 5, 4,
       [=](Tape<double>& t, Var x) {
         return weigh(t, t.scale(t.sub(t.add(x, t.constant(B)), t.hadamard(x, x)), 0.7));
       }},
      {"add_row", 1, 4, [=](Tape<double>& t, Var x) { return weigh(t, t.add_row(t.constant(B), x)); }},
      {"add_col", 5, 1, [=](Tape<double>& t, Var x) { return weigh(t, t.add_col(t.constant(B), x)); }},
      {"relu", 4, 4, [=](Tape<double>& t, Var x) { return weigh(t, t.relu(x)); }},
      {"gelu", 4, 4, [=](Tape<double>& t, Var x) { return weigh(t, t.gelu(x)); }},
      {"exp", 3, 3, [=](Tape<double>& t, Var x) { return weigh(t, t.exp(x)); }},
      {"softmax_rows", 4, 5, [=](Tape<double>& t, Var x) { return weigh(t, t.softmax_rows(x)); }},
      {"layer_norm", 4, 6,
       [=](Tape<double>& t, Var x) {
         return weigh(t, t.layer_norm(x, t.constant(W.row(0)), t.constant(W.row(1))));
       }},
      {"layer_norm_gain", 1, 4,
       [=](Tape<double>& t, Var x) { return weigh(t, t.layer_norm(t.constant(B), x, t.constant(B.row(0)))); }},
      {"logsumexp_rows", 4, 5, [=](Tape<double>& t, Var x) { return weigh(t, t.logsumexp_rows(x)); }},
      {"logsumexp_cols", 4, 5, [=](Tape<double>& t, Var x) { return weigh(t, t.logsumexp_cols(x)); }},
      {"gather_rows", 5, 3, [=](Tape<double>& t, Var x) { return weigh(t, t.gather_rows(x, rows)); }},
      {"slice_concat", 3, 6,
       [=](Tape<double>& t, Var x) {
         const std::vector<Var> parts{t.slice_cols(x, 3, 3), t.slice_cols(x, 0, 2)};
         return weigh(t, t.concat_cols(parts));
       }},
      {"append_dustbin", 1, 1,
       [=](Tape<double>& t, Var z) { return weigh(t, t.append_dustbin(t.constant(B), z)); }},
      {"append_dustbin_scores", 4, 3,
       [=](Tape<double>& t, Var x) { return weigh(t, t.append_dustbin(x, t.constant(Matrix::Ones(1, 1)))); }},
      {"normalize_rows", 4, 5, [=](Tape<double>& t, Var x) { return weigh(t, t.normalize_rows(x)); }},
      {"pick", 5, 5, [=](Tape<double>& t, Var x) { return weigh(t, t.pick(x, entries)); }},
      {"clamp_min", 4, 4, [=](Tape<double>& t, Var x) { return weigh(t, t.clamp_min(x, 0.05)); }},
      {"bce_with_logits", 5, 1, [=](Tape<double>& t, Var x) { return t.bce_with_logits(x, labels); }},
  };
}

TEST_P(PrimitiveGradient, MatchesFiniteDifferences) {
  const auto cases = primitive_cases();
  const auto& c = cases.at(static_cast<std::size_t>(GetParam()));
  std::mt19937_64 rng(100 + static_cast<std::uint64_t>(GetParam()));
  const Matrix theta = random_matrix(c.rows, c.cols, rng, -2.0, 2.0);
  const auto r = grad_check(c.f, theta);
  EXPECT_LT(r.max_relative_error, 1e-4) << c.name << " worst entry (" << r.worst_row << ", " << r.worst_col
                                        << "): analytic " << r.analytic << " numeric " << r.numeric;
}

INSTANTIATE_TEST_SUITE_P(AllPrimitives, PrimitiveGradient,
                         ::testing::Range(0, static_cast<int>(primitive_cases().size())),
                         [](const ::testing::TestParamInfo<int>& info) {
                           return std::string(primitive_cases().at(static_cast<std::size_t>(info.param)).name);
                         });

TEST(Tape, FloatMatchesDouble) {
  std::mt19937_64 rng(8);
  const Matrix x = random_matrix(4, 6, rng);
  Tape<float> tf(false);
  Tape<double> td(false);
  const MatrixF sf = tf.value(tf.softmax_rows(tf.constant(x.cast<float>())));
  const Matrix sd = td.value(td.softmax_rows(td.constant(x)));
  EXPECT_TRUE(sf.cast<double>().isApprox(sd, 1e-6));
}

TEST(Tape, NoRecordKeepsValuesOnly) {
  Tape<double> t(false);
  const Var p = t.parameter(Matrix::Ones(2, 2));
  EXPECT_FALSE(t.requires_grad(p));
  EXPECT_FALSE(t.recording());
}

}  // namespace
}  // namespace amatch::ad
