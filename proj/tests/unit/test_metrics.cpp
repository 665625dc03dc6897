#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "holo/metrics.hpp"

using namespace holo;

TEST(Classification, Perfect) {
  std::vector<std::size_t> t{0, 1, 2, 1, 0};
  auto m = classification_metrics(t, t, 3);
  EXPECT_DOUBLE_EQ(m.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(m.macro_f1, 1.0);
  EXPECT_DOUBLE_EQ(m.micro_f1, 1.0);
  EXPECT_EQ(m.confusion[1][1], 2u);
}

TEST(Classification, AllPredictedOneClass) {
  // class 0: P = 2/6, R = 1, F1 = 1/2; classes 1 and 2: F1 = 0
  std::vector<std::size_t> t{0, 0, 1, 1, 2, 2}, p(6, 0);
  auto m = classification_metrics(t, p, 3);
  EXPECT_NEAR(m.accuracy, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(m.macro_f1, 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(m.micro_f1, m.accuracy, 1e-15);
  EXPECT_EQ(m.confusion[2][0], 2u);
}

TEST(Classification, OneClassPredictorOnBalancedBinary) {
  // class 0: P = 1/2, R = 1, F1 = 2/3; class 1: F1 = 0
  std::vector<std::size_t> t{0, 1, 0, 1, 0, 1}, p(6, 0);
  auto m = classification_metrics(t, p, 2);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.5);
  EXPECT_NEAR(m.per_class_f1[0], 2.0 / 3.0, 1e-15);
  EXPECT_EQ(m.per_class_f1[1], 0.0);
  EXPECT_NEAR(m.macro_f1, 1.0 / 3.0, 1e-15);
}

TEST(Regression, ExactPredictionIsZeroError) {
  std::vector<ComplexMatrix> y{ComplexMatrix{{{0.5, -1.0}, {2.0, 3.0}}}};
  auto m = regression_metrics(y, y);
  EXPECT_EQ(m.mae, 0.0);
  EXPECT_EQ(m.rmse, 0.0);
}

TEST(Classification, AbsentClassesSkippedInMacro) {
  // class 2 never occurs; classes 0 and 1 have F1 2/3 and 2/3
  std::vector<std::size_t> t{0, 0, 1, 1}, p{0, 1, 1, 0};
  auto m = classification_metrics(t, p, 3);
  EXPECT_NEAR(m.macro_f1, 0.5, 1e-15);
  EXPECT_THROW(classification_metrics(t, std::vector<std::size_t>{0}, 3), DataError);
}

TEST(Regression, Examples) {
  std::vector<ComplexMatrix> truth{ComplexMatrix{{{0.0, 0.0}, {1.0, 0.0}}}};
  std::vector<ComplexMatrix> pred{ComplexMatrix{{{1.0, 1.0}, {1.0, 0.0}}}};
  auto m = regression_metrics(truth, pred);
  EXPECT_NEAR(m.mae, std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_NEAR(m.rmse, 1.0, 1e-15);
  EXPECT_NEAR(rms(pred), std::sqrt(1.5), 1e-15);
}

TEST(Robustness, RaucCases) {
  auto flat = summarize_robustness(TaskKind::kClassification, NoiseAxis::kSigma, "accuracy", true,
                                   {0.0, 0.5, 1.0}, {0.9, 0.9, 0.9});
  EXPECT_NEAR(flat.rauc, 1.0, 1e-15);
  EXPECT_NEAR(flat.relative_change[2], 0.0, 1e-12);

  auto single = summarize_robustness(TaskKind::kClassification, NoiseAxis::kSigma, "accuracy", true,
                                     {0.0}, {0.7});
  EXPECT_DOUBLE_EQ(single.rauc, 1.0);
  EXPECT_EQ(single.relative_change[0], 0.0);

  auto two = summarize_robustness(TaskKind::kClassification, NoiseAxis::kSigma, "accuracy", true,
                                  {0.0, 0.4}, {1.0, 0.8});
  EXPECT_NEAR(two.rauc, 0.9, 1e-15);

  // ratio 1 -> 0.8 linearly: mean 0.9
  auto lin = summarize_robustness(TaskKind::kClassification, NoiseAxis::kSigma, "accuracy", true,
                                  {0.0, 0.25, 1.0}, {1.0, 0.95, 0.8});
  EXPECT_NEAR(lin.rauc, 0.9, 1e-12);
  EXPECT_NEAR(lin.relative_change[2], 20.0, 1e-12);  // RD percent
  EXPECT_DOUBLE_EQ(lin.clean, 1.0);
}

TEST(Robustness, ErrorMetricsUseIncrease) {
  auto r = summarize_robustness(TaskKind::kRegression, NoiseAxis::kTau, "mae", false, {0.0, 1.0},
                                {0.1, 0.2});
  EXPECT_NEAR(r.relative_change[1], 100.0, 1e-12);
  // clean / m goes 1 -> 0.5
  EXPECT_NEAR(r.rauc, 0.75, 1e-12);
}

TEST(Robustness, GridValidation) {
  EXPECT_THROW(validate_grid(std::vector<double>{}), ConfigError);
  EXPECT_THROW(validate_grid(std::vector<double>{0.1, 0.2}), ConfigError);
  EXPECT_THROW(validate_grid(std::vector<double>{0.0, 0.2, 0.2}), ConfigError);
  EXPECT_NO_THROW(validate_grid(std::vector<double>{0.0, 0.2, 0.5}));
  for (auto axis : {NoiseAxis::kSigma, NoiseAxis::kTau}) {
    auto g = default_grid(axis);
    EXPECT_NO_THROW(validate_grid(g));
  }
  EXPECT_EQ(noise_axis_from_string(to_string(NoiseAxis::kTau)), NoiseAxis::kTau);
  EXPECT_THROW(noise_axis_from_string("gamma"), ConfigError);
}
