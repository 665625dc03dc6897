#include <gtest/gtest.h>

#include "holo/run_config.hpp"

using namespace holo;

TEST(RunConfig, DefaultsValidate) {
  EXPECT_NO_THROW(default_run_config(TaskKind::kClassification).validate());
  EXPECT_NO_THROW(default_run_config(TaskKind::kRegression).validate());
}

TEST(RunConfig, EmptyObjectGivesClassificationDefaults) {
  auto c = run_config_from_json("{}");
  EXPECT_EQ(run_config_to_json(c), run_config_to_json(default_run_config()));
  EXPECT_EQ(c.model.task, TaskKind::kClassification);
  EXPECT_DOUBLE_EQ(c.data.phase.phase_noise, 1.2);
}

TEST(RunConfig, RegressionDefaultsFollowGenerator) {
  auto c = run_config_from_json(R"({"data": {"generator": "phasor_prediction"}})");
  EXPECT_EQ(c.model.task, TaskKind::kRegression);
  EXPECT_EQ(c.model.seq_len, c.data.phasor.t_in);
  EXPECT_EQ(c.model.horizon, c.data.phasor.t_out);
  EXPECT_EQ(c.optim.schedule.kind, ScheduleKind::kPlateau);
}

TEST(RunConfig, RoundTrip) {
  auto c = run_config_from_json(R"({
    "seed": 5, "out": "runs/x",
    "model": {"alpha": 0.5, "ablate_phase_decay": true},
    "optim": {"epochs": 3, "lr": 0.01},
    "robustness": {"axis": "tau", "grid": [0, 0.1, 0.3]}
  })");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.out, "runs/x");
  EXPECT_TRUE(c.model.ablate_phase_decay);
  EXPECT_EQ(c.optim.epochs, 3u);
  EXPECT_EQ(c.robustness.axis, NoiseAxis::kTau);
  auto text = run_config_to_json(c);
  EXPECT_EQ(run_config_to_json(run_config_from_json(text)), text);
}

TEST(RunConfig, UnknownKeysRejected) {
  EXPECT_THROW(run_config_from_json(R"({"sed": 1})"), ConfigError);
  EXPECT_THROW(run_config_from_json(R"({"model": {"alhpa": 1}})"), ConfigError);
  EXPECT_THROW(run_config_from_json(R"({"optim": {"learning_rate": 1}})"), ConfigError);
}

TEST(RunConfig, MalformedAndMistypedRejected) {
  EXPECT_THROW(run_config_from_json("{"), ConfigError);
  EXPECT_THROW(run_config_from_json("[]"), ConfigError);
  EXPECT_THROW(run_config_from_json(R"({"seed": "five"})"), ConfigError);
}

TEST(RunConfig, ShapeConflictsRejected) {
  EXPECT_THROW(run_config_from_json(R"({"model": {"seq_len": 8}, "data": {"seq_len": 16}})"),
               ConfigError);
  EXPECT_THROW(run_config_from_json(R"({"model": {"num_classes": 3}})"), ConfigError);
  EXPECT_THROW(
      run_config_from_json(R"({"model": {"task": "regression"}})"), ConfigError);
  EXPECT_THROW(run_config_from_json(R"({"robustness": {"grid": [0.1, 0.2]}})"), ConfigError);
  EXPECT_THROW(run_config_from_json(R"({"data": {"generator": "sawtooth"}})"), ConfigError);
}

TEST(RunConfig, MakeDatasetMatchesSpec) {
  auto c = default_run_config();
  c.data.n = 10;
  auto ds = make_dataset(c.data);
  EXPECT_EQ(ds.size(), 10u);
  EXPECT_EQ(ds.seq_len(), c.data.seq_len);
  EXPECT_EQ(ds.dim(), c.data.dim);
  EXPECT_EQ(ds.seed, c.data.seed);
}
