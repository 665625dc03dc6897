#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "holo/ctensor.hpp"
#include "support.hpp"

using namespace holo;

TEST(Cdot, Examples) {
  std::vector<cplx> a{{1, 0}}, b{{1, 0}};
  EXPECT_EQ(cdot(a, b), cplx(1, 0));
  std::vector<cplx> c{{0, 1}};
  EXPECT_EQ(cdot(c, b), cplx(0, 1));
  // (1+i)*1 + 2*(1+i)
  std::vector<cplx> x{{1, 1}, {2, 0}}, y{{1, 0}, {1, -1}};
  EXPECT_EQ(cdot(x, y), cplx(3, 3));
}

TEST(Cdot, LengthMismatch) {
  std::vector<cplx> a{{1, 0}}, b{{1, 0}, {0, 1}};
  EXPECT_THROW(cdot(a, b), DimensionError);
}

TEST(Cdot, SelfIsRealNonNegative) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 1000; ++t) {
    auto a = test::random_complex(1, 1 + t % 7, rng);
    const cplx s = cdot(a.row(0), a.row(0));
    EXPECT_EQ(s.imag(), 0.0);
    EXPECT_GE(s.real(), 0.0);
  }
}

TEST(Cdot, GlobalRotationCancels) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int t = 0; t < 1000; ++t) {
    auto a = test::random_complex(1, 5, rng), b = test::random_complex(1, 5, rng);
    const cplx r = std::polar(1.0, u(rng));
    auto ar = scale(a, r), br = scale(b, r);
    const cplx s0 = cdot(a.row(0), b.row(0)), s1 = cdot(ar.row(0), br.row(0));
    EXPECT_LE(std::abs(s1 - s0), 1e-12 * std::max(1.0, std::abs(s0)));
  }
}

TEST(Angle, Examples) {
  EXPECT_EQ(angle({1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(angle({0, 1}), kPi / 2);
  EXPECT_EQ(angle({-1, 0}), kPi);
  EXPECT_EQ(angle({-1, -0.0}), kPi);
  EXPECT_EQ(angle({0, 0}), 0.0);
}

TEST(Angle, RangeAndReconstruction) {
  std::mt19937_64 rng(3);
  auto m = test::random_complex(100, 20, rng);
  for (const auto& z : m.values()) {
    const double a = angle(z);
    EXPECT_GT(a, -kPi);
    EXPECT_LE(a, kPi);
    EXPECT_LE(std::abs(std::polar(std::abs(z), a) - z), 1e-12 * std::abs(z));
  }
}

TEST(WrapAngle, PrincipalInterval) {
  EXPECT_NEAR(wrap_angle(2 * kPi - 0.2), -0.2, 1e-15);
  EXPECT_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(7.0), 7.0 - 2 * kPi, 1e-15);
  EXPECT_EQ(wrap_angle(0.3), 0.3);
}

TEST(RowSoftmax, Examples) {
  auto a = row_softmax(RealMatrix{{0.0, 0.0}});
  EXPECT_EQ(a(0, 0), 0.5);
  EXPECT_EQ(a(0, 1), 0.5);
  auto b = row_softmax(RealMatrix{{std::log(2.0), 0.0}});
  EXPECT_NEAR(b(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(b(0, 1), 1.0 / 3.0, 1e-15);
  auto c = row_softmax(RealMatrix{{1000.0, 0.0}});
  EXPECT_TRUE(all_finite(c));
  EXPECT_NEAR(c(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(c(0, 1), 0.0, 1e-15);
}

TEST(RowSoftmax, RowsSumToOneAndShiftInvariant) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    auto w = test::random_real(4, 1 + t % 9, rng, -20, 20);
    auto a = row_softmax(w);
    auto shifted = w;
    for (std::size_t i = 0; i < w.rows(); ++i) {
      double s = 0.0;
      for (double x : a.row(i)) {
        EXPECT_GE(x, 0.0);
        s += x;
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
      for (auto& x : shifted.row(i)) x += 3.5 * static_cast<double>(i + 1);
    }
    EXPECT_LE(max_abs_diff(row_softmax(shifted), a), 1e-12);
  }
}

TEST(LayerNorm, Examples) {
  std::vector<cplx> one(3, 1.0), zero(3, 0.0);
  auto c = complex_layer_norm(ComplexMatrix{{{2, 1}, {2, 1}, {2, 1}}}, one, zero, 1e-5);
  EXPECT_EQ(max_abs(c), 0.0);

  std::vector<cplx> one2(2, 1.0), zero2(2, 0.0);
  auto r = complex_layer_norm(ComplexMatrix{{{1, 0}, {-1, 0}}}, one2, zero2, 1e-300);
  EXPECT_NEAR(r(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(r(0, 1).real(), -1.0, 1e-15);

  std::vector<cplx> bias{{0.5, -1}, {2, 0}};
  auto g = complex_layer_norm(ComplexMatrix{{{3, 1}, {-1, 4}}}, zero2, bias, 1e-5);
  EXPECT_EQ(g(0, 0), bias[0]);
  EXPECT_EQ(g(0, 1), bias[1]);
}

TEST(LayerNorm, ZeroMeanUnitPower) {
  std::mt19937_64 rng(5);
  auto z = test::random_complex(6, 8, rng, 3.0);
  std::vector<cplx> one(8, 1.0), zero(8, 0.0);
  auto n = complex_layer_norm(z, one, zero, 1e-12);
  for (std::size_t i = 0; i < n.rows(); ++i) {
    cplx mu = 0.0;
    double p = 0.0;
    for (const auto& x : n.row(i)) {
      mu += x;
      p += std::norm(x);
    }
    EXPECT_LE(std::abs(mu) / 8.0, 1e-12);
    EXPECT_NEAR(p / 8.0, 1.0, 1e-10);
  }
}

TEST(LayerNorm, BadEps) {
  std::vector<cplx> one(1, 1.0), zero(1, 0.0);
  EXPECT_THROW(complex_layer_norm(ComplexMatrix(1, 1), one, zero, 0.0), ConfigError);
}

TEST(Matmul, MatchesNaiveLoops) {
  std::mt19937_64 rng(6);
  for (std::size_t m : {1u, 3u, 8u}) {
    for (std::size_t k : {1u, 5u, 16u}) {
      for (std::size_t n : {1u, 4u, 33u}) {
        auto a = test::random_complex(m, k, rng), b = test::random_complex(k, n, rng);
        const auto ref = test::naive_matmul(a, b);
        EXPECT_LE(max_abs_diff(matmul(a, b), ref), 1e-12);
        auto bh = conj_transpose(b);
        EXPECT_LE(max_abs_diff(matmul_nh(a, bh), ref), 1e-12);
        auto ah = conj_transpose(a);
        EXPECT_LE(max_abs_diff(matmul_hn(ah, b), ref), 1e-12);
      }
    }
  }
  EXPECT_THROW(matmul(ComplexMatrix(2, 3), ComplexMatrix(2, 3)), DimensionError);
}

TEST(Matrix, ShapeChecks) {
  EXPECT_THROW(ComplexMatrix(2, 2, std::vector<cplx>(3)), DimensionError);
  EXPECT_THROW(add(ComplexMatrix(1, 2), ComplexMatrix(2, 1)), DimensionError);
  auto r = row_norms(ComplexMatrix{{{3, 4}, {0, 0}}, {{1, 0}, {0, 1}}});
  EXPECT_EQ(r[0], 5.0);
  EXPECT_NEAR(r[1], std::sqrt(2.0), 1e-15);
}
