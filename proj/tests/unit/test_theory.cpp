#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "holo/theory.hpp"

using namespace holo;

namespace {

double extra(const CheckReport& r, const std::string& name) {
  for (const auto& [k, v] : r.extras)
    if (k == name) return v;
  ADD_FAILURE() << "no extra " << name << " in " << r.property;
  return std::nan("");
}

}  // namespace

TEST(Theory, SuitePassesWithinOneMinute) {
  const auto t0 = std::chrono::steady_clock::now();
  auto reports = run_suite();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ASSERT_EQ(reports.size(), 8u);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    EXPECT_EQ(reports[i].property, "P" + std::to_string(i + 1));
    EXPECT_TRUE(reports[i].pass) << reports[i].property << " " << reports[i].max_violation;
    EXPECT_EQ(reports[i].status(), CheckStatus::kPass);
    EXPECT_GT(reports[i].trials, 0u);
  }
  EXPECT_LT(secs, 60.0);
}

TEST(Theory, Deterministic) {
  TheoryOptions o;
  o.seed = 42;
  EXPECT_EQ(to_json_line(verify_p3(200, 1e-10, o)), to_json_line(verify_p3(200, 1e-10, o)));
  EXPECT_EQ(to_json_line(verify_p7(100, o)), to_json_line(verify_p7(100, o)));
}

TEST(Theory, LipschitzBoundExample) {
  // B (1 + alpha S / sqrt(d_k) * T / 4) = 1 (1 + 1 * 2 / 2 * 4 / 4)
  EXPECT_DOUBLE_EQ(p7_lipschitz_bound(1.0, 2.0, 1.0, 4, 4), 2.0);
  EXPECT_DOUBLE_EQ(p7_lipschitz_bound(3.0, 0.0, 5.0, 9, 100), 3.0);
}

TEST(Theory, P1InjectedPhaseIsCaught) {
  TheoryOptions o;
  o.injected_phase = 0.1;
  auto r = verify_p1(50, 1e-12, o);
  EXPECT_TRUE(r.negative_control);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.status(), CheckStatus::kExpectedFail);
  EXPECT_TRUE(r.acceptable());
}

TEST(Theory, P3FailsWithoutCoherentSum) {
  TheoryOptions o;
  o.attention.ablate_coherent_sum = true;
  auto r = verify_p3(300, 1e-10, o);
  EXPECT_EQ(r.status(), CheckStatus::kExpectedFail);
}

TEST(Theory, P4FailsWithoutPhaseDecay) {
  TheoryOptions o;
  o.attention.ablate_phase_decay = true;
  auto r = verify_p4(200, o);
  EXPECT_EQ(r.status(), CheckStatus::kExpectedFail);
}

TEST(Theory, P4MultiplicativeInvertsForNegativeSimilarity) {
  auto r = verify_p4(200);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(extra(r, "multiplicative_negative_sim_inversions"), 0.0);
}

TEST(LogPrecisionAttention, EqualPrecisionGivesMean) {
  ComplexMatrix u{{{1.0, 0.0}}, {{3.0, 2.0}}, {{-1.0, 1.0}}};
  auto h = log_precision_attention({2.0, 2.0, 2.0}, u);
  EXPECT_NEAR(std::abs(h(0, 0) - cplx(1.0, 1.0)), 0.0, 1e-15);
}

TEST(LogPrecisionAttention, DominantPrecisionSelectsRow) {
  ComplexMatrix u{{{1.0, 0.0}}, {{3.0, 2.0}}, {{-1.0, 1.0}}};
  auto h = log_precision_attention({1.0, 1e12, 1.0}, u, 7.0);
  EXPECT_NEAR(std::abs(h(0, 0) - cplx(3.0, 2.0)), 0.0, 1e-11);
  // precision-weighted mean: (1*1 + 3*3) / 4 = 2.5 for precisions {1, 3}
  ComplexMatrix v{{{1.0, 0.0}}, {{3.0, 0.0}}};
  EXPECT_NEAR(log_precision_attention({1.0, 3.0}, v)(0, 0).real(), 2.5, 1e-15);
}

TEST(Theory, P5ConcentrationRatio) {
  auto r = verify_p5_p6().p5;
  EXPECT_TRUE(r.pass);
  // 1/sqrt(T) from T=16 to T=1024 is a factor of 8
  EXPECT_NEAR(extra(r, "ratio"), 8.0, 3.0);
}

TEST(Theory, P8UnitAmplitudeLaw) {
  auto r = verify_p8(50000, AmplitudeLaw::kUnit);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(extra(r, "mse_amplitude_only"), 1.0, 0.02);
  EXPECT_NEAR(extra(r, "mse_zero"), 1.0, 1e-12);
}

TEST(Theory, JsonLineShape) {
  auto line = to_json_line(verify_p5_p6(20).p6);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_NE(line.find("\"property\":\"P6\""), std::string::npos);
  EXPECT_NE(line.find("\"status\":\"pass\""), std::string::npos);
}

TEST(Theory, MoreExamples) {
  // B=1, S=1, alpha=1, d_k=4, T=8: 1 (1 + 1/2 * 2)
  EXPECT_DOUBLE_EQ(p7_lipschitz_bound(1.0, 1.0, 1.0, 4, 8), 2.0);

  ComplexMatrix u{{{1.0, 0.0}}, {{3.0, 2.0}}, {{-1.0, 1.0}}};
  auto h = log_precision_attention({1.0, 1e9, 1.0}, u);
  EXPECT_NEAR(std::abs(h(0, 0) - cplx(3.0, 2.0)), 0.0, 1e-6);

  // alpha = 0 removes the phase dependence of the score entirely
  AttentionConfig c;
  c.d_k = 1;
  c.alpha = 0.0;
  RealMatrix sim(1, 3, 0.7), dphi(1, 3);
  dphi(0, 0) = 0.0;
  dphi(0, 1) = 1.0;
  dphi(0, 2) = kPi;
  auto w = score(sim, dphi, c);
  EXPECT_EQ(w(0, 0), w(0, 1));
  EXPECT_EQ(w(0, 1), w(0, 2));

  auto p8 = verify_p8(20000);
  EXPECT_NEAR(extra(p8, "mse_phase_aware"), 0.0, 1e-12);
}
