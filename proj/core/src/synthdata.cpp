#include "holo/synthdata.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include "binary_io.hpp"
#include <nlohmann/json.hpp>

namespace holo {

using nlohmann::json;

std::string to_string(TaskKind kind) {
  return kind == TaskKind::kClassification ? "classification" : "regression";
}

TaskKind task_kind_from_string(const std::string& s) {
  if (s == "classification") return TaskKind::kClassification;
  if (s == "regression") return TaskKind::kRegression;
  throw ConfigError("unknown task kind '" + s + "'");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void Dataset::validate() const {
  if (inputs.empty()) throw DataError("dataset: no samples");
  const auto t = inputs.front().rows(), d = inputs.front().cols();
  for (const auto& x : inputs) {
    if (x.rows() != t || x.cols() != d) throw DataError("dataset: ragged input shapes");
    if (!all_finite(x)) throw DataError("dataset: non-finite input entry");
  }
  if (kind == TaskKind::kClassification) {
    if (labels.size() != inputs.size()) throw DataError("dataset: label count != input count");
    if (num_classes < 1) throw DataError("dataset: num_classes must be >= 1");
    for (auto l : labels) {
      if (l >= num_classes) throw DataError("dataset: label out of range");
    }
  } else {
    if (targets.size() != inputs.size()) throw DataError("dataset: target count != input count");
    const auto h = targets.front().rows(), o = targets.front().cols();
    for (const auto& y : targets) {
      if (y.rows() != h || y.cols() != o) throw DataError("dataset: ragged target shapes");
      if (!all_finite(y)) throw DataError("dataset: non-finite target entry");
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.kind = kind;
  out.num_classes = num_classes;
  out.generator = generator;
  out.params = params;
  out.seed = seed;
  for (auto i : indices) {
    if (i >= size()) throw DataError("dataset: subset index out of range");
    out.inputs.push_back(inputs[i]);
    if (kind == TaskKind::kClassification) {
      out.labels.push_back(labels[i]);
    } else {
      out.targets.push_back(targets[i]);
    }
  }
  return out;
}

DatasetSplit split(const Dataset& ds, double test_fraction) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw ConfigError("split: test_fraction must be in [0, 1)");
  }
  const auto n = ds.size();
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  std::vector<std::size_t> tr, te;
  for (std::size_t i = 0; i < n; ++i) (i < n - n_test ? tr : te).push_back(i);
  return {ds.subset(tr), ds.subset(te)};
}

namespace {

double uniform_angle(std::mt19937_64& rng) {
  // (-pi, pi]
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return kPi - 2.0 * kPi * u(rng);
}

double rayleigh_unit_power(std::mt19937_64& rng) {
  // Rayleigh with E[A^2] = 1.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::sqrt(-std::log(1.0 - u(rng)));
}

}  // namespace

Dataset gen_phase_classification(std::size_t n, std::size_t seq_len, std::size_t dim,
                                 std::size_t num_classes, std::uint64_t seed,
                                 const PhaseClassificationOptions& opts) {
  if (num_classes < 2) throw ConfigError("gen_phase_classification: need K >= 2");
  if (seq_len < 1 || dim < 1) throw ConfigError("gen_phase_classification: empty shape");
  if (!(opts.phase_noise >= 0.0)) throw ConfigError("gen_phase_classification: phase_noise < 0");
  if (!(opts.doppler >= 0.0)) throw ConfigError("gen_phase_classification: doppler < 0");
  Dataset ds;
  ds.kind = TaskKind::kClassification;
  ds.num_classes = num_classes;
  ds.generator = "phase_classification";
  ds.seed = seed;
  ds.params = {{"n", double(n)},
               {"seq_len", double(seq_len)},
               {"dim", double(dim)},
               {"num_classes", double(num_classes)},
               {"phase_noise", opts.phase_noise},
               {"doppler", opts.doppler}};
  ds.inputs.reserve(n);
  ds.labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::mt19937_64 rng(derive_seed(seed, i));
    std::uniform_int_distribution<std::size_t> pick(0, num_classes - 1);
    std::normal_distribution<double> noise(0.0, 1.0);
    const std::size_t k = pick(rng);
    const double step = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(num_classes);
    const double psi = uniform_angle(rng);
    const double omega = std::uniform_real_distribution<double>(-opts.doppler, opts.doppler)(rng);
    ComplexMatrix x(seq_len, dim);
    for (std::size_t t = 0; t < seq_len; ++t) {
      for (std::size_t c = 0; c < dim; ++c) {
        const double a = rayleigh_unit_power(rng);
        const double eta = opts.phase_noise > 0.0 ? opts.phase_noise * noise(rng) : 0.0;
        const double phase =
            psi + omega * static_cast<double>(t) + step * static_cast<double>(c) + eta;
        x(t, c) = std::polar(a, phase);
      }
    }
    ds.inputs.push_back(std::move(x));
    ds.labels.push_back(k);
  }
  return ds;
}

Dataset gen_phasor_prediction(std::size_t n, const PhasorPredictionOptions& opts,
                              std::uint64_t seed) {
  if (opts.t_in < 1 || opts.t_out < 1) throw ConfigError("gen_phasor_prediction: T_in, T_out >= 1");
  if (opts.dim < 1 || opts.n_phasors < 1) {
    throw ConfigError("gen_phasor_prediction: dim and n_phasors must be >= 1");
  }
  if (!(opts.doppler_range >= 0.0) || !(opts.speed_kmh >= 0.0)) {
    throw ConfigError("gen_phasor_prediction: doppler_range and speed must be >= 0");
  }
  Dataset ds;
  ds.kind = TaskKind::kRegression;
  ds.generator = "phasor_prediction";
  ds.seed = seed;
  ds.params = {{"n", double(n)},
               {"t_in", double(opts.t_in)},
               {"t_out", double(opts.t_out)},
               {"dim", double(opts.dim)},
               {"n_phasors", double(opts.n_phasors)},
               {"doppler_range", opts.doppler_range},
               {"speed_kmh", opts.speed_kmh}};
  const double omega_max = opts.doppler_range * opts.speed_kmh / 30.0;
  const double amp_scale = 1.0 / std::sqrt(static_cast<double>(opts.n_phasors));
  const std::size_t total = opts.t_in + opts.t_out;
  for (std::size_t i = 0; i < n; ++i) {
    std::mt19937_64 rng(derive_seed(seed, i));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexMatrix seq(total, opts.dim);
    for (std::size_t c = 0; c < opts.dim; ++c) {
      for (std::size_t m = 0; m < opts.n_phasors; ++m) {
        const double a = amp_scale * rayleigh_unit_power(rng);
        const double omega = omega_max * u(rng);
        const double phi = uniform_angle(rng);
        for (std::size_t t = 0; t < total; ++t) {
          seq(t, c) += std::polar(a, omega * static_cast<double>(t) + phi);
        }
      }
    }
    ComplexMatrix x(opts.t_in, opts.dim), y(opts.t_out, opts.dim);
    for (std::size_t t = 0; t < total; ++t)
      for (std::size_t c = 0; c < opts.dim; ++c) (t < opts.t_in ? x(t, c) : y(t - opts.t_in, c)) = seq(t, c);
    ds.inputs.push_back(std::move(x));
    ds.targets.push_back(std::move(y));
  }
  return ds;
}

void NoiseSpec::validate() const {
  if (!(sigma >= 0.0)) throw ConfigError("noise: sigma must be >= 0");
  if (!(tau >= 0.0)) throw ConfigError("noise: tau must be >= 0");
}

namespace {

double ulp_step(double v, int k) {
  for (; k > 0; --k) v = std::nextafter(v, std::numeric_limits<double>::infinity());
  for (; k < 0; ++k) v = std::nextafter(v, -std::numeric_limits<double>::infinity());
  return v;
}

// Rotation changes |z| by an ulp or so. Rescale, then search the few-ulp
// neighbourhood for a point whose modulus is bitwise r.
cplx with_modulus(cplx y, double r) {
  if (std::abs(y) == r) return y;
  const double a = std::abs(y);
  if (a > 0.0) y *= r / a;
  if (std::abs(y) == r) return y;
  for (int rad = 1; rad <= 8; ++rad) {
    for (int i = -rad; i <= rad; ++i) {
      for (int j = -rad; j <= rad; ++j) {
        if (std::max(std::abs(i), std::abs(j)) != rad) continue;
        const cplx z{ulp_step(y.real(), i), ulp_step(y.imag(), j)};
        if (std::abs(z) == r) return z;
      }
    }
  }
  return y;
}

}  // namespace

ComplexMatrix apply_phase_jitter(const ComplexMatrix& x, double sigma, std::uint64_t seed,
                                 bool per_token) {
  if (!(sigma >= 0.0)) throw ConfigError("apply_phase_jitter: sigma must be >= 0");
  if (sigma == 0.0) return x;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, sigma);
  ComplexMatrix out(x.rows(), x.cols());
  for (std::size_t t = 0; t < x.rows(); ++t) {
    double eta = per_token ? nd(rng) : 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (!per_token) eta = nd(rng);
      out(t, c) = with_modulus(x(t, c) * cplx{std::cos(eta), std::sin(eta)}, std::abs(x(t, c)));
    }
  }
  return out;
}

ComplexMatrix apply_amplitude_noise(const ComplexMatrix& x, double tau, std::uint64_t seed,
                                    bool additive) {
  if (!(tau >= 0.0)) throw ConfigError("apply_amplitude_noise: tau must be >= 0");
  if (tau == 0.0) return x;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, tau);
  ComplexMatrix out(x.rows(), x.cols());
  if (additive) {
    double p = 0.0;
    for (const auto& z : x.values()) p += std::norm(z);
    const double rms = x.empty() ? 0.0 : std::sqrt(p / static_cast<double>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double re = nd(rng), im = nd(rng);
      out.data()[i] = x.data()[i] + rms * cplx{re, im} / std::sqrt(2.0);
    }
    return out;
  }
  for (std::size_t i = 0; i < x.size(); ++i) out.data()[i] = x.data()[i] * (1.0 + nd(rng));
  return out;
}

Dataset apply_noise(const Dataset& ds, const NoiseSpec& noise) {
  noise.validate();
  Dataset out = ds;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto s = derive_seed(noise.seed, i);
    out.inputs[i] = apply_amplitude_noise(
        apply_phase_jitter(out.inputs[i], noise.sigma, derive_seed(s, 0), noise.per_token),
        noise.tau, derive_seed(s, 1), noise.additive_amplitude);
  }
  return out;
}

// ---- container --------------------------------------------------------------------

namespace {
constexpr char kDatasetMagic[8] = {'H', 'O', 'L', 'O', 'D', 'S', '0', '1'};
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  ds.validate();
  json header;
  header["kind"] = to_string(ds.kind);
  header["n"] = ds.size();
  header["seq_len"] = ds.seq_len();
  header["dim"] = ds.dim();
  header["num_classes"] = ds.num_classes;
  header["horizon"] = ds.kind == TaskKind::kRegression ? ds.targets.front().rows() : 0;
  header["d_out"] = ds.kind == TaskKind::kRegression ? ds.targets.front().cols() : 0;
  header["seed"] = ds.seed;
  header["generator"] = ds.generator;
  header["params"] = ds.params;
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("save_dataset: cannot open " + path.string());
  out.write(kDatasetMagic, sizeof(kDatasetMagic));
  io::write_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    io::write_complex_values(out, ds.inputs[i]);
    if (ds.kind == TaskKind::kClassification) {
      io::write_i64(out, static_cast<std::int64_t>(ds.labels[i]));
    } else {
      io::write_complex_values(out, ds.targets[i]);
    }
  }
  if (!out) throw DataError("save_dataset: write failed for " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("load_dataset: cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kDatasetMagic, sizeof(magic)) != 0) {
    throw DataError("load_dataset: bad magic in " + path.string());
  }
  const auto len = io::read_u32(in);
  std::string text(len, '\0');
  in.read(text.data(), len);
  if (!in) throw DataError("load_dataset: truncated header");
  json header;
  try {
    header = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("load_dataset: bad header: ") + e.what());
  }
  Dataset ds;
  ds.kind = task_kind_from_string(header.at("kind").get<std::string>());
  const auto n = header.at("n").get<std::size_t>();
  const auto t = header.at("seq_len").get<std::size_t>();
  const auto d = header.at("dim").get<std::size_t>();
  ds.num_classes = header.at("num_classes").get<std::size_t>();
  const auto horizon = header.at("horizon").get<std::size_t>();
  const auto d_out = header.at("d_out").get<std::size_t>();
  ds.seed = header.at("seed").get<std::uint64_t>();
  ds.generator = header.at("generator").get<std::string>();
  ds.params = header.at("params").get<std::map<std::string, double>>();
  for (std::size_t i = 0; i < n; ++i) {
    ds.inputs.push_back(io::read_complex_values(in, t, d));
    if (ds.kind == TaskKind::kClassification) {
      const auto l = io::read_i64(in);
      if (l < 0) throw DataError("load_dataset: negative label");
      ds.labels.push_back(static_cast<std::size_t>(l));
    } else {
      ds.targets.push_back(io::read_complex_values(in, horizon, d_out));
    }
  }
  ds.validate();
  return ds;
}

void export_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("export_csv: cannot open " + path.string());
  out.precision(17);
  const bool cls = ds.kind == TaskKind::kClassification;
  out << "sample,role,t,c,re,im" << (cls ? ",label" : "") << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto emit = [&](const ComplexMatrix& m, const char* role) {
      for (std::size_t t = 0; t < m.rows(); ++t)
        for (std::size_t c = 0; c < m.cols(); ++c) {
          out << i << ',' << role << ',' << t << ',' << c << ',' << m(t, c).real() << ','
              << m(t, c).imag();
          if (cls) out << ',' << ds.labels[i];
          out << '\n';
        }
    };
    emit(ds.inputs[i], "input");
    if (!cls) emit(ds.targets[i], "target");
  }
}

}  // namespace holo
