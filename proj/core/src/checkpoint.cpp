#include <cstring>
#include <fstream>

#include "binary_io.hpp"
#include "config_json.hpp"
#include "holo/model.hpp"

namespace holo {

namespace cfgjson {

json model_to_json(const ModelConfig& c) {
  json j;
  j["seq_len"] = c.seq_len;
  j["d_in"] = c.d_in;
  j["d_model"] = c.d_model;
  j["heads"] = c.heads;
  j["layers"] = c.layers;
  j["d_ff"] = c.d_ff;
  j["alpha"] = c.alpha;
  j["attn_eps"] = c.attn_eps;
  j["ln_eps"] = c.ln_eps;
  j["additive_variant"] = c.additive_variant;
  j["gamma"] = c.gamma;
  j["lambda_r"] = c.lambda_r;
  j["lambda_t"] = c.lambda_t;
  j["lambda_p"] = c.lambda_p;
  j["task"] = to_string(c.task);
  j["num_classes"] = c.num_classes;
  j["d_out"] = c.d_out;
  j["horizon"] = c.horizon;
  j["dropout"] = c.dropout;
  j["ablate_phase_decay"] = c.ablate_phase_decay;
  j["ablate_coherent_sum"] = c.ablate_coherent_sum;
  j["ablate_reconstruction"] = c.ablate_reconstruction;
  j["magnitude_only"] = c.magnitude_only;
  j["positional_encoding"] = c.positional_encoding;
  j["ffn_activation"] = to_string(c.ffn_activation);
  return j;
}

ModelConfig model_from_json(const json& j, ModelConfig c) {
  const std::string where = "model config";
  reject_unknown(j, {"seq_len", "d_in", "d_model", "heads", "layers", "d_ff", "alpha",
                     "attn_eps", "ln_eps", "additive_variant", "gamma", "lambda_r", "lambda_t",
                     "lambda_p", "task", "num_classes", "d_out", "horizon", "dropout",
                     "ablate_phase_decay", "ablate_coherent_sum", "ablate_reconstruction",
                     "magnitude_only", "positional_encoding", "ffn_activation"},
                 where);
  read_opt(j, "seq_len", c.seq_len, where);
  read_opt(j, "d_in", c.d_in, where);
  read_opt(j, "d_model", c.d_model, where);
  read_opt(j, "heads", c.heads, where);
  read_opt(j, "layers", c.layers, where);
  read_opt(j, "d_ff", c.d_ff, where);
  read_opt(j, "alpha", c.alpha, where);
  read_opt(j, "attn_eps", c.attn_eps, where);
  read_opt(j, "ln_eps", c.ln_eps, where);
  read_opt(j, "additive_variant", c.additive_variant, where);
  read_opt(j, "gamma", c.gamma, where);
  read_opt(j, "lambda_r", c.lambda_r, where);
  read_opt(j, "lambda_t", c.lambda_t, where);
  read_opt(j, "lambda_p", c.lambda_p, where);
  std::string s;
  read_opt(j, "task", s, where);
  if (!s.empty()) c.task = task_kind_from_string(s);
  read_opt(j, "num_classes", c.num_classes, where);
  read_opt(j, "d_out", c.d_out, where);
  read_opt(j, "horizon", c.horizon, where);
  read_opt(j, "dropout", c.dropout, where);
  read_opt(j, "ablate_phase_decay", c.ablate_phase_decay, where);
  read_opt(j, "ablate_coherent_sum", c.ablate_coherent_sum, where);
  read_opt(j, "ablate_reconstruction", c.ablate_reconstruction, where);
  read_opt(j, "magnitude_only", c.magnitude_only, where);
  read_opt(j, "positional_encoding", c.positional_encoding, where);
  s.clear();
  read_opt(j, "ffn_activation", s, where);
  if (!s.empty()) c.ffn_activation = ffn_activation_from_string(s);
  c.validate();
  return c;
}

}  // namespace cfgjson

namespace {
constexpr char kCheckpointMagic[8] = {'H', 'O', 'L', 'O', 'C', 'K', '0', '1'};
}

std::string model_config_to_json(const ModelConfig& cfg) {
  return cfgjson::model_to_json(cfg).dump(2);
}

ModelConfig model_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model config: parse error: ") + e.what());
  }
  return cfgjson::model_from_json(j);
}

void save_checkpoint(const std::filesystem::path& path, const ModelConfig& cfg,
                     const ad::ParamStore& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("save_checkpoint: cannot open " + path.string());
  const auto text = cfgjson::model_to_json(cfg).dump();
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  io::write_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  io::write_u32(out, static_cast<std::uint32_t>(params.params().size()));
  for (const auto& p : params.params()) {
    io::write_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    io::write_u64(out, p.value.rows());
    io::write_u64(out, p.value.cols());
    io::write_complex_values(out, p.value);
  }
  if (!out) throw DataError("save_checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("load_checkpoint: cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw DataError("load_checkpoint: bad magic in " + path.string());
  }
  auto read_string = [&](std::uint32_t len) {
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw DataError("load_checkpoint: truncated file");
    return s;
  };
  Checkpoint ck;
  ck.config = model_config_from_json(read_string(io::read_u32(in)));
  const auto n = io::read_u32(in);
  for (std::uint32_t i = 0; i < n; ++i) {
    auto name = read_string(io::read_u32(in));
    const auto rows = io::read_u64(in);
    const auto cols = io::read_u64(in);
    ck.params.add(name, io::read_complex_values(in, rows, cols));
  }
  // Shapes must match what this config would build.
  const auto ref = init_params(ck.config, 0);
  if (ref.params().size() != ck.params.params().size()) {
    throw DataError("load_checkpoint: tensor count does not match config");
  }
  for (const auto& p : ref.params()) {
    if (!ck.params.contains(p.name)) throw DataError("load_checkpoint: missing tensor " + p.name);
    if (!ck.params.at(p.name).value.same_shape(p.value)) {
      throw DataError("load_checkpoint: shape mismatch for " + p.name);
    }
  }
  return ck;
}

}  // namespace holo
