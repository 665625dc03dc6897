#include "holo/model.hpp"

#include <cmath>

namespace holo {

std::string to_string(FfnActivation a) {
  return a == FfnActivation::kSplitRelu ? "split_relu" : "phase_tanh";
}

FfnActivation ffn_activation_from_string(const std::string& s) {
  if (s == "split_relu") return FfnActivation::kSplitRelu;
  if (s == "phase_tanh") return FfnActivation::kPhaseTanh;
  throw ConfigError("unknown ffn activation '" + s + "'");
}

void ModelConfig::validate() const {
  if (seq_len < 1 || d_in < 1 || d_model < 1) throw ConfigError("model: dimensions must be >= 1");
  if (heads < 1) throw ConfigError("model: heads must be >= 1");
  if (d_model % heads != 0) {
    throw ConfigError("model: d_model " + std::to_string(d_model) + " not divisible by heads " +
                      std::to_string(heads));
  }
  if (layers > 0 && d_ff < 1) throw ConfigError("model: d_ff must be >= 1");
  if (!(lambda_r >= 0.0) || !(lambda_t >= 0.0) || !(lambda_p >= 0.0)) {
    throw ConfigError("model: loss weights must be >= 0");
  }
  if (!(lambda_r + lambda_t > 0.0)) throw ConfigError("model: lambda_r + lambda_t must be > 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("model: dropout must be in [0, 1)");
  if (!(ln_eps > 0.0)) throw ConfigError("model: ln_eps must be > 0");
  if (task == TaskKind::kClassification && num_classes < 1) {
    throw ConfigError("model: num_classes must be >= 1");
  }
  if (task == TaskKind::kRegression && (d_out < 1 || horizon < 1)) {
    throw ConfigError("model: d_out and horizon must be >= 1");
  }
  attention().validate();
}

AttentionConfig ModelConfig::attention() const {
  AttentionConfig a;
  a.d_k = d_model / heads;
  a.alpha = alpha;
  a.eps = attn_eps;
  a.heads = heads;
  a.ablate_phase_decay = ablate_phase_decay;
  a.ablate_coherent_sum = ablate_coherent_sum;
  a.additive_variant = additive_variant;
  a.gamma = gamma;
  return a;
}

ComplexMatrix positional_encoding(std::size_t seq_len, std::size_t d_model) {
  ComplexMatrix pe(seq_len, d_model);
  for (std::size_t k = 0; k < d_model; ++k) {
    const double w = std::pow(10000.0, -static_cast<double>(k) / static_cast<double>(d_model));
    for (std::size_t t = 0; t < seq_len; ++t) {
      const double a = static_cast<double>(t) * w;
      pe(t, k) = {std::cos(a), std::sin(a)};
    }
  }
  return pe;
}

ComplexMatrix embed(const ComplexMatrix& x, const ComplexMatrix& w_e, bool add_positional) {
  auto z = matmul(x, w_e);
  if (add_positional) z = add(z, positional_encoding(z.rows(), z.cols()));
  return z;
}

ComplexMatrix complex_ffn(const ComplexMatrix& z, const ComplexMatrix& w1, const ComplexMatrix& b1,
                          const ComplexMatrix& w2, const ComplexMatrix& b2, FfnActivation act) {
  ad::Tape tape;
  auto h = ad::add_row(ad::matmul(tape.constant(z), tape.constant(w1)), tape.constant(b1));
  h = act == FfnActivation::kSplitRelu ? ad::split_relu(h) : ad::phase_tanh(h);
  return ad::add_row(ad::matmul(h, tape.constant(w2)), tape.constant(b2)).value();
}

namespace {

std::string layer_name(std::size_t l, const std::string& leaf) {
  return "layer" + std::to_string(l) + "." + leaf;
}

ComplexMatrix complex_gaussian(std::size_t rows, std::size_t cols, double var,
                               std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(var / 2.0));
  ComplexMatrix m(rows, cols);
  for (auto& z : m.values()) {
    const double re = nd(rng);
    const double im = nd(rng);
    z = {re, im};
  }
  return m;
}

ComplexMatrix real_gaussian(std::size_t rows, std::size_t cols, double var, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(var));
  ComplexMatrix m(rows, cols);
  for (auto& z : m.values()) z = {nd(rng), 0.0};
  return m;
}

ComplexMatrix ones_row(std::size_t n) { return ComplexMatrix(1, n, cplx{1.0, 0.0}); }

RealMatrix dropout_mask(std::size_t rows, std::size_t cols, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(1.0 - p);
  RealMatrix m(rows, cols);
  const double s = 1.0 / (1.0 - p);
  for (auto& x : m.values()) x = keep(rng) ? s : 0.0;
  return m;
}

ComplexMatrix ingest(const ComplexMatrix& x, const ModelConfig& cfg) {
  if (!cfg.magnitude_only) return x;
  ComplexMatrix m(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) m.data()[i] = std::abs(x.data()[i]);
  return m;
}

}  // namespace

ad::ParamStore init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  ad::ParamStore ps;
  const auto dm = cfg.d_model, dk = cfg.d_k();
  ps.add("embed.w", complex_gaussian(cfg.d_in, dm, 1.0 / double(cfg.d_in), rng));
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      for (const char* p : {"q", "k", "v"}) {
        ps.add(layer_name(l, std::string("attn.") + p + std::to_string(h)),
               complex_gaussian(dm, dk, 1.0 / double(dm), rng));
      }
    }
    ps.add(layer_name(l, "attn.o"), complex_gaussian(dm, dm, 1.0 / double(dm), rng));
    ps.add(layer_name(l, "ln1.gain"), ones_row(dm));
    ps.add(layer_name(l, "ln1.bias"), ComplexMatrix(1, dm));
    ps.add(layer_name(l, "ffn.w1"), complex_gaussian(dm, cfg.d_ff, 2.0 / double(dm), rng));
    ps.add(layer_name(l, "ffn.b1"), ComplexMatrix(1, cfg.d_ff));
    ps.add(layer_name(l, "ffn.w2"), complex_gaussian(cfg.d_ff, dm, 1.0 / double(cfg.d_ff), rng));
    ps.add(layer_name(l, "ffn.b2"), ComplexMatrix(1, dm));
    ps.add(layer_name(l, "ln2.gain"), ones_row(dm));
    ps.add(layer_name(l, "ln2.bias"), ComplexMatrix(1, dm));
  }
  ps.add("recon.w", complex_gaussian(dm, cfg.d_in, 1.0 / double(dm), rng));
  if (cfg.task == TaskKind::kClassification) {
    ps.add("task.w", real_gaussian(2 * dm, cfg.num_classes, 1.0 / double(2 * dm), rng));
    ps.add("task.b", ComplexMatrix(1, cfg.num_classes));
  } else {
    const auto in = cfg.seq_len * dm, out = cfg.horizon * cfg.d_out;
    ps.add("task.w", complex_gaussian(in, out, 1.0 / double(in), rng));
    ps.add("task.b", ComplexMatrix(1, out));
  }
  return ps;
}

ForwardVars forward(ad::Tape& tape, const ad::ParamStore& params, const ComplexMatrix& x,
                    const ModelConfig& cfg, const ForwardOptions& opts) {
  if (x.rows() != cfg.seq_len || x.cols() != cfg.d_in) {
    throw DimensionError("forward: input " + shape_str(x) + " but model expects " +
                         shape_str(cfg.seq_len, cfg.d_in));
  }
  const bool drop = opts.training && cfg.dropout > 0.0;
  if (drop && !opts.rng) throw ConfigError("forward: training with dropout needs an rng");
  const auto attn_cfg = cfg.attention();
  const auto dk = cfg.d_k();

  ForwardVars fv;
  auto z = ad::matmul(tape.constant(ingest(x, cfg), "input"), tape.param(params, "embed.w"));
  if (cfg.positional_encoding) {
    z = ad::add(z, tape.constant(positional_encoding(cfg.seq_len, cfg.d_model), "pe"));
  }

  for (std::size_t l = 0; l < cfg.layers; ++l) {
    // One projection for every head's q, k and v, then sliced per head.
    std::vector<ad::Var> w_parts;
    for (const char* p : {"q", "k", "v"})
      for (std::size_t h = 0; h < cfg.heads; ++h)
        w_parts.push_back(tape.param(params, layer_name(l, std::string("attn.") + p + std::to_string(h))));
    auto qkv = ad::matmul(z, ad::concat_cols(w_parts));
    const auto hd = cfg.heads * dk;
    std::vector<ad::Var> heads;
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      auto q = ad::slice_cols(qkv, h * dk, dk);
      auto k = ad::slice_cols(qkv, hd + h * dk, dk);
      auto v = ad::slice_cols(qkv, 2 * hd + h * dk, dk);
      RealMatrix mask;
      if (drop) mask = dropout_mask(cfg.seq_len, cfg.seq_len, cfg.dropout, *opts.rng);
      AttentionTrace tr;
      heads.push_back(ad::attention_head(q, k, v, attn_cfg, drop ? &mask : nullptr, &tr));
      fv.traces.push_back(std::move(tr));
    }
    auto attn = ad::matmul(heads.size() == 1 ? heads.front() : ad::concat_cols(heads),
                           tape.param(params, layer_name(l, "attn.o")));
    z = ad::layer_norm(ad::add(z, attn), tape.param(params, layer_name(l, "ln1.gain")),
                       tape.param(params, layer_name(l, "ln1.bias")), cfg.ln_eps);

    auto f = ad::add_row(ad::matmul(z, tape.param(params, layer_name(l, "ffn.w1"))),
                         tape.param(params, layer_name(l, "ffn.b1")));
    f = cfg.ffn_activation == FfnActivation::kSplitRelu ? ad::split_relu(f) : ad::phase_tanh(f);
    if (drop) f = ad::mask_mul(f, dropout_mask(f.rows(), f.cols(), cfg.dropout, *opts.rng));
    f = ad::add_row(ad::matmul(f, tape.param(params, layer_name(l, "ffn.w2"))),
                    tape.param(params, layer_name(l, "ffn.b2")));
    z = ad::layer_norm(ad::add(z, f), tape.param(params, layer_name(l, "ln2.gain")),
                       tape.param(params, layer_name(l, "ln2.bias")), cfg.ln_eps);
  }
  fv.encoded = z;
  fv.recon = ad::matmul(z, tape.param(params, "recon.w"));

  if (cfg.task == TaskKind::kClassification) {
    auto feats = ad::re_im_concat(ad::mean_rows(z));
    fv.task_output = ad::add_row(ad::matmul(feats, tape.param(params, "task.w")),
                                 tape.param(params, "task.b"));
  } else {
    auto flat = ad::reshape(z, 1, cfg.seq_len * cfg.d_model);
    auto out = ad::add_row(ad::matmul(flat, tape.param(params, "task.w")),
                           tape.param(params, "task.b"));
    fv.task_output = ad::reshape(out, cfg.horizon, cfg.d_out);
  }
  return fv;
}

LossVars sample_loss(ad::Tape& tape, const ForwardVars& fwd, const ComplexMatrix& x,
                     std::size_t label, const ComplexMatrix* target, const ModelConfig& cfg) {
  (void)tape;
  LossVars lv;
  lv.recon = ad::mean_squared_error(fwd.recon, x);
  if (cfg.task == TaskKind::kClassification) {
    lv.task = ad::cross_entropy(fwd.task_output, label);
  } else {
    if (!target) throw DataError("sample_loss: regression needs a target sequence");
    lv.task = ad::mean_squared_error(fwd.task_output, *target);
  }
  lv.phase_reg = ad::phase_smoothness(fwd.encoded);
  const std::pair<double, ad::Var> terms[] = {{cfg.effective_lambda_r(), lv.recon},
                                              {cfg.lambda_t, lv.task},
                                              {cfg.lambda_p, lv.phase_reg}};
  lv.total = ad::weighted_sum(terms);
  return lv;
}

EncodeResult encode(const ComplexMatrix& x, const ad::ParamStore& params, const ModelConfig& cfg) {
  ad::Tape tape;
  auto fv = forward(tape, params, x, cfg);
  return {fv.encoded.value(), std::move(fv.traces)};
}

ComplexMatrix recon_head(const ComplexMatrix& z, const ComplexMatrix& w_r) { return matmul(z, w_r); }

TaskOutput task_head(const ComplexMatrix& z, const ModelConfig& cfg, const ComplexMatrix& w_t,
                     const ComplexMatrix& b_t) {
  ad::Tape tape;
  auto zv = tape.constant(z);
  TaskOutput out;
  if (cfg.task == TaskKind::kClassification) {
    auto logits = ad::add_row(ad::matmul(ad::re_im_concat(ad::mean_rows(zv)), tape.constant(w_t)),
                              tape.constant(b_t));
    for (const auto& v : logits.value().values()) out.logits.push_back(v.real());
  } else {
    auto flat = ad::reshape(zv, 1, z.size());
    auto y = ad::add_row(ad::matmul(flat, tape.constant(w_t)), tape.constant(b_t));
    out.prediction = ad::reshape(y, cfg.horizon, cfg.d_out).value();
  }
  return out;
}

double recon_loss(const ComplexMatrix& x_hat, const ComplexMatrix& x) {
  if (!x_hat.same_shape(x)) {
    throw DimensionError("recon_loss: " + shape_str(x_hat) + " vs " + shape_str(x));
  }
  if (x.empty()) throw DimensionError("recon_loss: empty input");
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const cplx d = x_hat.data()[i] - x.data()[i];
    re += d.real() * d.real();
    im += d.imag() * d.imag();
  }
  return (re + im) / static_cast<double>(x.size());
}

double task_loss(std::span<const double> logits, std::size_t label) {
  if (label >= logits.size()) {
    throw DataError("task_loss: label " + std::to_string(label) + " out of range for " +
                    std::to_string(logits.size()) + " classes");
  }
  double mx = logits[0];
  for (double l : logits) mx = std::max(mx, l);
  double s = 0.0;
  for (double l : logits) s += std::exp(l - mx);
  return mx + std::log(s) - logits[label];
}

double task_loss(const ComplexMatrix& pred, const ComplexMatrix& target) {
  return recon_loss(pred, target);
}

double phase_reg(const ComplexMatrix& z) {
  if (z.rows() < 2 || z.cols() == 0) return 0.0;
  double s = 0.0;
  for (std::size_t t = 0; t + 1 < z.rows(); ++t)
    for (std::size_t k = 0; k < z.cols(); ++k)
      s += std::abs(wrap_angle(angle(z(t + 1, k)) - angle(z(t, k))));
  return s / static_cast<double>((z.rows() - 1) * z.cols());
}

LossBreakdown total_loss(const Dataset& batch, const ad::ParamStore& params,
                         const ModelConfig& cfg) {
  if (batch.size() == 0) throw DataError("total_loss: empty batch");
  LossBreakdown lb;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    ad::Tape tape;
    auto fv = forward(tape, params, batch.inputs[i], cfg);
    const bool cls = cfg.task == TaskKind::kClassification;
    auto lv = sample_loss(tape, fv, batch.inputs[i], cls ? batch.labels[i] : 0,
                          cls ? nullptr : &batch.targets[i], cfg);
    lb.recon += lv.recon.scalar();
    lb.task += lv.task.scalar();
    lb.phase_reg += lv.phase_reg.scalar();
  }
  const double n = static_cast<double>(batch.size());
  lb.recon /= n;
  lb.task /= n;
  lb.phase_reg /= n;
  lb.total = cfg.effective_lambda_r() * lb.recon + cfg.lambda_t * lb.task + cfg.lambda_p * lb.phase_reg;
  return lb;
}

Prediction predict(const ComplexMatrix& x, const ad::ParamStore& params, const ModelConfig& cfg) {
  ad::Tape tape;
  auto fv = forward(tape, params, x, cfg);
  Prediction p;
  const auto& out = fv.task_output.value();
  if (cfg.task == TaskKind::kClassification) {
    for (const auto& v : out.values()) p.logits.push_back(v.real());
    std::size_t best = 0;
    for (std::size_t c = 1; c < p.logits.size(); ++c)
      if (p.logits[c] > p.logits[best]) best = c;
    p.label = best;
  } else {
    p.sequence = out;
  }
  return p;
}

}  // namespace holo
