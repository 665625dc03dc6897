#include <gtest/gtest.h>

#include <cstring>
#include <limits>

#include "holo/training.hpp"

using namespace holo;

namespace {

ModelConfig tiny(TaskKind task = TaskKind::kClassification) {
  ModelConfig c;
  c.seq_len = 6;
  c.d_in = 2;
  c.d_model = 4;
  c.heads = 2;
  c.layers = 1;
  c.d_ff = 8;
  c.num_classes = 2;
  c.task = task;
  c.horizon = 3;
  c.d_out = 1;
  c.d_in = task == TaskKind::kRegression ? 1 : 2;
  return c;
}

Dataset tiny_data(std::size_t n = 24) { return gen_phase_classification(n, 6, 2, 2, 3); }

bool same_params(const ad::ParamStore& a, const ad::ParamStore& b) {
  if (a.params().size() != b.params().size()) return false;
  for (std::size_t i = 0; i < a.params().size(); ++i) {
    const auto& x = a.params()[i].value;
    const auto& y = b.params()[i].value;
    if (!x.same_shape(y) || std::memcmp(x.data(), y.data(), x.size() * sizeof(cplx)) != 0)
      return false;
  }
  return true;
}

}  // namespace

TEST(LrSchedule, Step) {
  ScheduleOptions o;
  o.kind = ScheduleKind::kStep;
  o.step_size = 2;
  o.gamma = 0.5;
  LrSchedule s(1.0, o);
  std::vector<double> seen;
  for (int e = 0; e < 5; ++e) {
    seen.push_back(s.lr());
    s.epoch_end(1.0);
  }
  EXPECT_EQ(seen, (std::vector<double>{1.0, 1.0, 0.5, 0.5, 0.25}));
}

TEST(LrSchedule, Plateau) {
  ScheduleOptions o;
  o.kind = ScheduleKind::kPlateau;
  o.patience = 2;
  o.factor = 0.1;
  o.min_lr = 0.05;
  LrSchedule s(1.0, o);
  s.epoch_end(1.0);  // improvement
  s.epoch_end(1.0);
  s.epoch_end(1.0);
  EXPECT_DOUBLE_EQ(s.lr(), 1.0);
  s.epoch_end(1.0);  // third epoch without improvement
  EXPECT_DOUBLE_EQ(s.lr(), 0.1);
  for (int i = 0; i < 3; ++i) s.epoch_end(1.0);
  EXPECT_DOUBLE_EQ(s.lr(), 0.05);  // floored
  s.epoch_end(0.5);
  EXPECT_DOUBLE_EQ(s.lr(), 0.05);
}

TEST(LrSchedule, Validation) {
  ScheduleOptions o;
  o.kind = ScheduleKind::kStep;
  o.step_size = 0;
  EXPECT_THROW(o.validate(), ConfigError);
  EXPECT_EQ(schedule_kind_from_string("plateau"), ScheduleKind::kPlateau);
  EXPECT_THROW(schedule_kind_from_string("cosine"), ConfigError);
}

TEST(Train, ZeroLearningRateKeepsHistoryFlat) {
  auto cfg = tiny();
  TrainOptions o;
  o.epochs = 3;
  o.batch_size = 8;
  o.adam.lr = 0.0;
  auto init = init_params(cfg, 1);
  auto r = train(cfg, tiny_data(), o, init);
  ASSERT_EQ(r.history.size(), 3u);
  for (const auto& e : r.history) {
    EXPECT_EQ(e.loss.total, r.history[0].loss.total);
    EXPECT_EQ(e.lr, 0.0);
  }
  EXPECT_TRUE(same_params(r.params, init));
}

TEST(Train, SeedDeterminism) {
  auto cfg = tiny();
  TrainOptions o;
  o.epochs = 2;
  o.batch_size = 5;
  o.seed = 77;
  auto data = tiny_data();
  auto a = train(cfg, data, o, init_params(cfg, 2));
  auto b = train(cfg, data, o, init_params(cfg, 2));
  EXPECT_TRUE(same_params(a.params, b.params));
  for (std::size_t i = 0; i < a.history.size(); ++i)
    EXPECT_EQ(a.history[i].loss.total, b.history[i].loss.total);
  o.seed = 78;
  auto c = train(cfg, data, o, init_params(cfg, 2));
  EXPECT_FALSE(same_params(a.params, c.params));
}

TEST(Train, LinearAutoencoderReconstructionDecreases) {
  auto cfg = tiny();
  cfg.layers = 0;
  cfg.lambda_t = 0.0;
  cfg.lambda_p = 0.0;
  cfg.dropout = 0.0;
  TrainOptions o;
  o.epochs = 15;
  o.batch_size = 24;
  o.shuffle = false;
  o.adam.lr = 1e-2;
  auto r = train(cfg, tiny_data(), o, init_params(cfg, 3));
  for (std::size_t i = 1; i < r.history.size(); ++i)
    EXPECT_LT(r.history[i].loss.recon, r.history[i - 1].loss.recon) << "epoch " << i + 1;
  EXPECT_LT(r.history.back().loss.recon, 0.5 * r.history.front().loss.recon);
}

TEST(Train, LearnsTinyClassification) {
  auto cfg = tiny();
  cfg.dropout = 0.0;
  TrainOptions o;
  o.epochs = 6;
  o.batch_size = 4;
  o.adam.lr = 1e-2;
  auto data = gen_phase_classification(64, 6, 2, 2, 4);
  auto r = train(cfg, data, o, init_params(cfg, 4));
  EXPECT_LT(r.history.back().loss.task, r.history.front().loss.task);
}

TEST(Train, HugeLearningRateDiverges) {
  auto cfg = tiny();
  TrainOptions o;
  o.epochs = 5;
  o.batch_size = 4;
  o.adam.lr = 1e300;
  o.adam.eps = 1e-300;
  EXPECT_THROW(train(cfg, tiny_data(), o, init_params(cfg, 5)), TrainingDiverged);
}

TEST(Train, NonFiniteInputNamesTheCause) {
  auto cfg = tiny();
  auto data = tiny_data(4);
  data.inputs[0](0, 0) = {std::numeric_limits<double>::infinity(), 0.0};
  TrainOptions o;
  o.epochs = 1;
  EXPECT_ANY_THROW(train(cfg, data, o, init_params(cfg, 6)));
}

TEST(Train, ShapeMismatchIsDataError) {
  auto cfg = tiny();
  TrainOptions o;
  o.epochs = 1;
  auto wrong = gen_phase_classification(8, 7, 2, 2, 1);
  EXPECT_THROW(train(cfg, wrong, o, init_params(cfg, 0)), DataError);
}

TEST(Train, OnEpochCallback) {
  auto cfg = tiny();
  TrainOptions o;
  o.epochs = 2;
  std::vector<std::size_t> epochs;
  o.on_epoch = [&](const EpochRecord& e, const ad::ParamStore&) { epochs.push_back(e.epoch); };
  train(cfg, tiny_data(8), o, init_params(cfg, 0));
  EXPECT_EQ(epochs, (std::vector<std::size_t>{1, 2}));
}

TEST(GradCheck, ReportsEveryTensor) {
  auto cfg = tiny(TaskKind::kRegression);
  auto r = grad_check(cfg, 9);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.tensors.size(), init_params(cfg, 0).params().size());
  EXPECT_GT(r.min_kink_distance, 1e-4);
}
