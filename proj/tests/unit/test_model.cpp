#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "holo/model.hpp"
#include "holo/training.hpp"
#include "support.hpp"

using namespace holo;

namespace {

ModelConfig small_cfg(TaskKind task = TaskKind::kClassification) {
  ModelConfig c;
  c.seq_len = 5;
  c.d_in = 2;
  c.d_model = 8;
  c.heads = 2;
  c.layers = 1;
  c.d_ff = 12;
  c.task = task;
  c.num_classes = 3;
  c.horizon = 3;
  c.d_out = 2;
  c.dropout = 0.0;
  return c;
}

bool bitwise_equal(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.same_shape(b) && std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}

}  // namespace

TEST(PositionalEncoding, Examples) {
  auto pe = positional_encoding(3, 2);
  EXPECT_EQ(pe(0, 0), cplx(1.0, 0.0));
  EXPECT_EQ(pe(0, 1), cplx(1.0, 0.0));
  EXPECT_NEAR(pe(1, 0).real(), std::cos(1.0), 1e-15);
  EXPECT_NEAR(pe(1, 0).imag(), std::sin(1.0), 1e-15);
  // w_1 = 10000^(-1/2) = 0.01
  EXPECT_NEAR(pe(2, 1).real(), std::cos(0.02), 1e-15);
  EXPECT_NEAR(pe(2, 1).imag(), std::sin(0.02), 1e-15);
  const auto big = positional_encoding(7, 5);
  for (auto z : big.values()) EXPECT_NEAR(std::abs(z), 1.0, 1e-15);
}

TEST(Embed, Examples) {
  ComplexMatrix x{{{1.0, 1.0}, {0.0, 0.0}}, {{0.0, 0.0}, {2.0, 0.0}}};
  ComplexMatrix w{{{1.0, 0.0}, {0.0, 0.0}, {0.0, 1.0}}, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}}};
  auto z = embed(x, w, false);
  EXPECT_EQ(z(0, 0), cplx(1.0, 1.0));
  EXPECT_EQ(z(0, 2), cplx(-1.0, 1.0));
  EXPECT_EQ(z(1, 1), cplx(2.0, 0.0));
  auto zp = embed(x, w, true);
  EXPECT_LE(max_abs_diff(zp, add(z, positional_encoding(2, 3))), 0.0);
}

TEST(ComplexFfn, SplitReluExample) {
  ComplexMatrix z{{{1.0, -2.0}, {-0.5, 0.25}}};
  ComplexMatrix eye{{{1.0, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {1.0, 0.0}}};
  ComplexMatrix b1{{{0.0, 0.0}, {0.0, 0.0}}};
  ComplexMatrix b2{{{0.0, 1.0}, {0.0, 0.0}}};
  auto y = complex_ffn(z, eye, b1, eye, b2);
  EXPECT_EQ(y(0, 0), cplx(1.0, 1.0));
  EXPECT_EQ(y(0, 1), cplx(0.0, 0.25));
}

TEST(ComplexFfn, PhaseTanhKeepsPhase) {
  ComplexMatrix z{{{3.0, 4.0}}};
  ComplexMatrix one{{{1.0, 0.0}}}, zero{{{0.0, 0.0}}};
  auto y = complex_ffn(z, one, zero, one, zero, FfnActivation::kPhaseTanh);
  EXPECT_NEAR(std::abs(y(0, 0)), std::tanh(5.0), 1e-15);
  EXPECT_NEAR(angle(y(0, 0)), std::atan2(4.0, 3.0), 1e-15);
}

TEST(Model, ZeroLayersEncodeIsEmbedding) {
  auto cfg = small_cfg();
  cfg.layers = 0;
  auto p = init_params(cfg, 3);
  std::mt19937_64 rng(1);
  auto x = test::random_complex(cfg.seq_len, cfg.d_in, rng);
  auto z = encode(x, p, cfg).z;
  EXPECT_LE(max_abs_diff(z, embed(x, p.at("embed.w").value, true)), 1e-15);
}

TEST(Model, InitAndForwardDeterministic) {
  auto cfg = small_cfg();
  auto a = init_params(cfg, 11), b = init_params(cfg, 11), c = init_params(cfg, 12);
  ASSERT_EQ(a.params().size(), b.params().size());
  for (std::size_t i = 0; i < a.params().size(); ++i)
    EXPECT_TRUE(bitwise_equal(a.params()[i].value, b.params()[i].value)) << a.params()[i].name;
  EXPECT_GT(max_abs_diff(a.at("embed.w").value, c.at("embed.w").value), 0.0);
  std::mt19937_64 rng(2);
  auto x = test::random_complex(cfg.seq_len, cfg.d_in, rng);
  EXPECT_EQ(predict(x, a, cfg).logits, predict(x, b, cfg).logits);
}

TEST(Model, ParameterNames) {
  auto cfg = small_cfg();
  auto p = init_params(cfg, 0);
  for (const char* n : {"embed.w", "layer0.attn.q0", "layer0.attn.k1", "layer0.attn.v1",
                        "layer0.attn.o", "layer0.ln1.gain", "layer0.ln2.bias", "layer0.ffn.w1",
                        "layer0.ffn.b2", "recon.w", "task.w", "task.b"})
    EXPECT_TRUE(p.contains(n)) << n;
}

TEST(ReconHead, RightInverseRecoversInput) {
  // With no encoder layers and no PE, Z = X W_e; W_r = W_e^H (W_e W_e^H)^-1
  // then reproduces X exactly.
  std::mt19937_64 rng(4);
  auto we = test::random_complex(2, 4, rng);
  auto g = matmul(we, conj_transpose(we));
  const cplx det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  ComplexMatrix ginv{{g(1, 1) / det, -g(0, 1) / det}, {-g(1, 0) / det, g(0, 0) / det}};
  auto wr = matmul(conj_transpose(we), ginv);
  auto x = test::random_complex(6, 2, rng);
  EXPECT_LE(max_abs_diff(recon_head(embed(x, we, false), wr), x), 1e-12);
}

TEST(TaskHead, ClassificationExample) {
  auto cfg = small_cfg();
  cfg.d_model = 1;
  cfg.num_classes = 2;
  ComplexMatrix z{{{1.0, 2.0}}, {{3.0, -4.0}}};  // mean row = 2 - 1j
  // features [Re, Im] = [2, -1]
  ComplexMatrix w{{{1.0, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {1.0, 0.0}}};
  ComplexMatrix b{{{0.5, 0.0}, {-0.5, 0.0}}};
  auto out = task_head(z, cfg, w, b);
  ASSERT_EQ(out.logits.size(), 2u);
  EXPECT_DOUBLE_EQ(out.logits[0], 2.5);
  EXPECT_DOUBLE_EQ(out.logits[1], -1.5);
}

TEST(TaskHead, RegressionExample) {
  auto cfg = small_cfg(TaskKind::kRegression);
  cfg.d_model = 1;
  cfg.horizon = 1;
  cfg.d_out = 1;
  ComplexMatrix z{{{1.0, 0.0}}, {{0.0, 1.0}}};
  ComplexMatrix w{{{2.0, 0.0}}, {{0.0, -1.0}}};
  ComplexMatrix b{{{0.0, 0.5}}};
  auto out = task_head(z, cfg, w, b);
  // 1*2 + j*(-j) + 0.5j = 3 + 0.5j
  EXPECT_EQ(out.prediction(0, 0), cplx(3.0, 0.5));
}

TEST(Losses, ReconExample) {
  ComplexMatrix xh{{{1.0, 1.0}}}, x{{{0.0, 0.0}}};
  EXPECT_DOUBLE_EQ(recon_loss(xh, x), 2.0);
  EXPECT_THROW(recon_loss(xh, ComplexMatrix(2, 1)), DimensionError);
}

TEST(Losses, CrossEntropyExamples) {
  std::vector<double> flat(4, 0.0);
  EXPECT_NEAR(task_loss(flat, 2), std::log(4.0), 1e-15);
  std::vector<double> margin{50.0, 0.0};
  EXPECT_NEAR(task_loss(margin, 0), 0.0, 1e-20);
  EXPECT_NEAR(task_loss(margin, 1), 50.0, 1e-12);
  EXPECT_THROW(task_loss(flat, 4), DataError);
}

TEST(Losses, PhaseRegExamples) {
  ComplexMatrix quarter{{{1.0, 0.0}}, {{0.0, 1.0}}};
  EXPECT_NEAR(phase_reg(quarter), kPi / 2, 1e-15);
  // 3.1 -> -3.0831853 wraps to a step of +0.2
  ComplexMatrix across{{std::polar(1.0, 3.1)}, {std::polar(1.0, 3.1 + 0.2 - 2 * kPi)}};
  EXPECT_NEAR(phase_reg(across), 0.2, 1e-12);
  ComplexMatrix flat(4, 3, cplx{0.3, -0.7});
  EXPECT_EQ(phase_reg(flat), 0.0);
  EXPECT_EQ(phase_reg(ComplexMatrix(1, 3, cplx{1.0, 1.0})), 0.0);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto z = test::random_complex(6, 3, rng);
    const double th = std::uniform_real_distribution<double>(-kPi, kPi)(rng);
    EXPECT_NEAR(phase_reg(scale(z, std::polar(1.0, th))), phase_reg(z), 1e-12);
  }
}

TEST(Losses, TotalLossArithmetic) {
  auto cfg = small_cfg();
  cfg.lambda_r = 0.7;
  cfg.lambda_t = 1.3;
  cfg.lambda_p = 0.05;
  auto p = init_params(cfg, 6);
  auto data = gen_phase_classification(6, cfg.seq_len, cfg.d_in, cfg.num_classes, 9);

  double r = 0, t = 0, ph = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto enc = encode(data.inputs[i], p, cfg);
    r += recon_loss(recon_head(enc.z, p.at("recon.w").value), data.inputs[i]);
    auto out = task_head(enc.z, cfg, p.at("task.w").value, p.at("task.b").value);
    t += task_loss(out.logits, data.labels[i]);
    ph += phase_reg(enc.z);
  }
  r /= 6;
  t /= 6;
  ph /= 6;
  auto lb = total_loss(data, p, cfg);
  EXPECT_NEAR(lb.recon, r, 1e-12);
  EXPECT_NEAR(lb.task, t, 1e-12);
  EXPECT_NEAR(lb.phase_reg, ph, 1e-12);
  EXPECT_NEAR(lb.total, 0.7 * r + 1.3 * t + 0.05 * ph, 1e-12);

  cfg.ablate_reconstruction = true;
  auto la = total_loss(data, p, cfg);
  EXPECT_NEAR(la.recon, r, 1e-12);
  EXPECT_NEAR(la.total, 1.3 * t + 0.05 * ph, 1e-12);
}

TEST(Model, MagnitudeOnlyIgnoresPhase) {
  auto cfg = small_cfg();
  cfg.magnitude_only = true;
  auto p = init_params(cfg, 7);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 10; ++i) {
    auto x = test::random_complex(cfg.seq_len, cfg.d_in, rng);
    // jitter keeps |x| bit for bit, so the ingested input is identical
    auto y = apply_phase_jitter(x, 2.0, 100 + i);
    EXPECT_EQ(predict(x, p, cfg).logits, predict(y, p, cfg).logits);
  }
}

TEST(Model, ShapeMismatchRejected) {
  auto cfg = small_cfg();
  auto p = init_params(cfg, 0);
  EXPECT_THROW(predict(ComplexMatrix(cfg.seq_len + 1, cfg.d_in), p, cfg), DimensionError);
}

TEST(ModelConfig, Validation) {
  auto cfg = small_cfg();
  cfg.heads = 3;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_cfg();
  cfg.lambda_r = cfg.lambda_t = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_cfg();
  cfg.dropout = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(ModelGradient, FullModelMatchesFiniteDifferences) {
  for (auto task : {TaskKind::kClassification, TaskKind::kRegression}) {
    auto cfg = small_cfg(task);
    cfg.seq_len = 4;
    for (std::uint64_t s = 0; s < 3; ++s) {
      auto r = grad_check(cfg, s);
      EXPECT_TRUE(r.pass) << to_string(task) << " seed " << s << " err " << r.max_rel_err;
      EXPECT_LE(r.max_rel_err, 1e-5);
    }
  }
}

TEST(ModelGradient, AblationsAndVariants) {
  auto cfg = small_cfg();
  cfg.seq_len = 4;
  cfg.ablate_phase_decay = true;
  EXPECT_TRUE(grad_check(cfg, 1).pass);
  cfg = small_cfg();
  cfg.seq_len = 4;
  cfg.ablate_coherent_sum = true;
  cfg.ffn_activation = FfnActivation::kPhaseTanh;
  EXPECT_TRUE(grad_check(cfg, 2).pass);
  cfg = small_cfg();
  cfg.seq_len = 4;
  cfg.additive_variant = true;
  EXPECT_TRUE(grad_check(cfg, 3).pass);
}

TEST(ModelGradient, LinearModelTightTolerance) {
  auto cfg = small_cfg(TaskKind::kRegression);
  cfg.layers = 0;
  cfg.lambda_p = 0.0;
  GradCheckOptions o;
  o.tolerance = 1e-7;
  EXPECT_TRUE(grad_check(cfg, 4, o).pass);
}

TEST(Checkpoint, RoundTripIsBitwise) {
  auto cfg = small_cfg(TaskKind::kRegression);
  cfg.alpha = 0.37;
  cfg.ablate_phase_decay = true;
  cfg.ffn_activation = FfnActivation::kPhaseTanh;
  auto p = init_params(cfg, 13);
  auto path = std::filesystem::temp_directory_path() / "holo_test_ckpt.holock";
  save_checkpoint(path, cfg, p);
  auto ck = load_checkpoint(path);
  EXPECT_EQ(model_config_to_json(ck.config), model_config_to_json(cfg));
  ASSERT_EQ(ck.params.params().size(), p.params().size());
  for (std::size_t i = 0; i < p.params().size(); ++i) {
    EXPECT_EQ(ck.params.params()[i].name, p.params()[i].name);
    EXPECT_TRUE(bitwise_equal(ck.params.params()[i].value, p.params()[i].value));
  }
  std::filesystem::remove(path);
}

TEST(Checkpoint, CorruptFileRejected) {
  auto path = std::filesystem::temp_directory_path() / "holo_test_bad.holock";
  {
    std::ofstream f(path, std::ios::binary);
    f << "NOTACKPT";
  }
  EXPECT_THROW(load_checkpoint(path), DataError);
  std::filesystem::remove(path);
}

TEST(ModelConfigJson, RoundTripAndStrictKeys) {
  auto cfg = small_cfg();
  cfg.gamma = 2.5;
  auto text = model_config_to_json(cfg);
  EXPECT_EQ(model_config_to_json(model_config_from_json(text)), text);
  EXPECT_THROW(model_config_from_json(R"({"d_modle": 8})"), ConfigError);
}

TEST(Embed, MoreExamples) {
  std::mt19937_64 rng(30);
  auto w = test::random_complex(3, 5, rng);
  EXPECT_LE(max_abs_diff(embed(ComplexMatrix(4, 3), w), positional_encoding(4, 5)), 0.0);
  auto x = test::random_complex(4, 3, rng);
  ComplexMatrix eye(3, 3);
  for (std::size_t i = 0; i < 3; ++i) eye(i, i) = 1.0;
  EXPECT_LE(max_abs_diff(sub(embed(x, eye), positional_encoding(4, 3)), x), 1e-15);
  EXPECT_EQ(embed(ComplexMatrix{{{2.0, 0.0}}}, ComplexMatrix{{{0.0, 1.0}}}, false)(0, 0),
            cplx(0.0, 2.0));
  auto pe = positional_encoding(4, 2);
  EXPECT_NEAR(pe(1, 0).real(), 0.5403, 1e-4);
  EXPECT_NEAR(pe(1, 0).imag(), 0.8415, 1e-4);
}

TEST(ComplexFfn, MoreExamples) {
  std::mt19937_64 rng(31);
  auto w1 = test::random_complex(3, 4, rng), w2 = test::random_complex(4, 3, rng);
  EXPECT_EQ(max_abs(complex_ffn(ComplexMatrix(2, 3), w1, ComplexMatrix(1, 4), w2,
                                ComplexMatrix(1, 3))),
            0.0);
  ComplexMatrix eye{{{1.0, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {1.0, 0.0}}};
  ComplexMatrix zero(1, 2);
  ComplexMatrix pos{{{0.5, 0.0}, {2.0, 0.0}}};
  EXPECT_EQ(max_abs_diff(complex_ffn(pos, eye, zero, eye, zero), pos), 0.0);
  ComplexMatrix neg{{{-1.0, -1.0}}};
  ComplexMatrix one{{{1.0, 0.0}}}, z1(1, 1);
  EXPECT_EQ(complex_ffn(neg, one, z1, one, z1)(0, 0), cplx(0.0, 0.0));
}

TEST(Model, EncoderCommutesWithGlobalRotation) {
  // zero biases, real LN gains, no PE and a rotation-equivariant activation
  auto cfg = small_cfg();
  cfg.positional_encoding = false;
  cfg.ffn_activation = FfnActivation::kPhaseTanh;
  cfg.layers = 2;
  auto p = init_params(cfg, 32);
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 20; ++i) {
    auto x = test::random_complex(cfg.seq_len, cfg.d_in, rng);
    const cplx r = std::polar(1.0, u(rng));
    auto a = encode(scale(x, r), p, cfg).z;
    auto b = scale(encode(x, p, cfg).z, r);
    EXPECT_LE(max_abs_diff(a, b), 1e-8);
  }
}

TEST(ReconHead, ZeroWeightsAndShape) {
  std::mt19937_64 rng(34);
  auto z = test::random_complex(5, 8, rng);
  auto y = recon_head(z, ComplexMatrix(8, 3));
  EXPECT_EQ(y.rows(), 5u);
  EXPECT_EQ(y.cols(), 3u);
  EXPECT_EQ(max_abs(y), 0.0);
}

TEST(TaskHead, MoreExamples) {
  auto cfg = small_cfg();
  cfg.d_model = 1;
  cfg.num_classes = 3;
  auto zero = task_head(ComplexMatrix(4, 1), cfg, ComplexMatrix(2, 3), ComplexMatrix(1, 3));
  EXPECT_EQ(zero.logits, (std::vector<double>{0.0, 0.0, 0.0}));
  EXPECT_NEAR(task_loss(zero.logits, 1), std::log(3.0), 1e-15);

  cfg.num_classes = 1;
  auto single = task_head(ComplexMatrix(4, 1), cfg, ComplexMatrix(2, 1), ComplexMatrix{{{0.3, 0.0}}});
  ASSERT_EQ(single.logits.size(), 1u);
  EXPECT_DOUBLE_EQ(single.logits[0], 0.3);

  // pooled [1+2i] -> features [1, 2], read back through identity weights
  cfg.num_classes = 2;
  ComplexMatrix z{{{1.0, 2.0}}};
  ComplexMatrix eye{{{1.0, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {1.0, 0.0}}};
  auto f = task_head(z, cfg, eye, ComplexMatrix(1, 2));
  EXPECT_EQ(f.logits, (std::vector<double>{1.0, 2.0}));
}

TEST(Losses, ZeroAndRotationCases) {
  std::mt19937_64 rng(35);
  auto x = test::random_complex(4, 3, rng), xh = test::random_complex(4, 3, rng);
  EXPECT_EQ(recon_loss(x, x), 0.0);
  EXPECT_EQ(task_loss(x, x), 0.0);
  const cplx r = std::polar(1.0, 1.234);
  EXPECT_NEAR(recon_loss(scale(xh, r), scale(x, r)), recon_loss(xh, x), 1e-12);
  ComplexMatrix three{{std::polar(1.0, 0.0)}, {std::polar(1.0, kPi / 2)}, {std::polar(1.0, kPi)}};
  EXPECT_NEAR(phase_reg(three), kPi / 2, 1e-15);
  ComplexMatrix wrap{{std::polar(1.0, kPi - 0.1)}, {std::polar(1.0, -kPi + 0.1)}};
  EXPECT_NEAR(phase_reg(wrap), 0.2, 1e-12);
}

TEST(Losses, PerfectAutoencoderHasZeroTotal) {
  auto cfg = small_cfg();
  cfg.layers = 0;
  cfg.positional_encoding = false;
  cfg.d_model = 4;
  cfg.lambda_r = 1.0;
  cfg.lambda_t = 0.0;
  cfg.lambda_p = 0.0;
  auto p = init_params(cfg, 36);
  const auto& we = p.at("embed.w").value;  // 2 x 4
  auto g = matmul(we, conj_transpose(we));
  const cplx det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  ComplexMatrix ginv{{g(1, 1) / det, -g(0, 1) / det}, {-g(1, 0) / det, g(0, 0) / det}};
  p.at("recon.w").value = matmul(conj_transpose(we), ginv);
  auto data = gen_phase_classification(5, cfg.seq_len, cfg.d_in, cfg.num_classes, 2);
  auto lb = total_loss(data, p, cfg);
  EXPECT_LE(lb.recon, 1e-20);
  EXPECT_NEAR(lb.total, 0.0, 1e-12);
}
