#pragma once

// Seeded synthetic datasets and the two robustness noise channels.
//
// Every generator is a pure function of (parameters, seed). Sample i draws
// from its own generator seeded with derive_seed(seed, i), so any subset of
// samples can be regenerated independently and in any order.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "holo/ctensor.hpp"

namespace holo {

enum class TaskKind { kClassification, kRegression };

std::string to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& s);

/// splitmix64 of (seed, index); used for per-sample and per-trial streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

struct Dataset {
  TaskKind kind = TaskKind::kClassification;
  std::vector<ComplexMatrix> inputs;   // each T x d_in
  std::vector<std::size_t> labels;     // classification
  std::vector<ComplexMatrix> targets;  // regression, each horizon x d_out
  std::size_t num_classes = 0;
  std::string generator;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return inputs.size(); }
  std::size_t seq_len() const { return inputs.empty() ? 0 : inputs.front().rows(); }
  std::size_t dim() const { return inputs.empty() ? 0 : inputs.front().cols(); }

  /// Throws DataError on count mismatches, ragged shapes, bad labels or
  /// non-finite entries.
  void validate() const;
  Dataset subset(std::span<const std::size_t> indices) const;
};

struct DatasetSplit {
  Dataset train;
  Dataset test;
};

/// First (1 - test_fraction) of the samples train, the rest test. Samples
/// are i.i.d. by construction so no shuffle is needed.
DatasetSplit split(const Dataset& ds, double test_fraction);

struct PhaseClassificationOptions {
  /// Std (radians) of i.i.d. Gaussian phase noise on every entry.
  double phase_noise = 0.0;
  /// Per-sample carrier frequency omega ~ U(-doppler, doppler), rad/step.
  double doppler = kPi;
};

/// Sequences whose class lives only in relative phase.
///
///   x[t, c] = A[t, c] exp(j (psi + omega t + 2 pi k c / K + eta[t, c]))
///
/// Each sample is a phasor with random phase psi and Doppler omega; class k
/// sets the phase offset pattern 2 pi k c / K across components c.
/// A[t, c] is Rayleigh with E[A^2] = 1 and drawn the same way for every
/// class, so |x| carries no class information at all. Because omega varies
/// per sample, tokens only add up coherently after their relative phase is
/// compensated.
Dataset gen_phase_classification(std::size_t n, std::size_t seq_len, std::size_t dim,
                                 std::size_t num_classes, std::uint64_t seed,
                                 const PhaseClassificationOptions& opts = {});

struct PhasorPredictionOptions {
  std::size_t t_in = 12;
  std::size_t t_out = 12;
  std::size_t dim = 1;
  std::size_t n_phasors = 1;
  /// Max |omega| in rad/step at the reference speed.
  double doppler_range = 0.1;
  /// Doppler scales linearly with speed relative to 30 km/h.
  double speed_kmh = 30.0;
};

/// x_t = sum_m A_m exp(j (omega_m t + phi_m)) per channel; inputs are the
/// first t_in steps and targets the next t_out. A_m is Rayleigh with
/// E[sum_m A_m^2] = 1, omega_m uniform in +-doppler, phi_m uniform.
Dataset gen_phasor_prediction(std::size_t n, const PhasorPredictionOptions& opts,
                              std::uint64_t seed);

struct NoiseSpec {
  double sigma = 0.0;  // phase jitter std, radians
  double tau = 0.0;    // relative amplitude noise std
  std::uint64_t seed = 0;
  bool per_token = false;          // one jitter draw per row instead of per entry
  bool additive_amplitude = false;  // x + tau |x|_rms n instead of x (1 + eps)

  void validate() const;
};

/// x' = x exp(j eta), eta ~ N(0, sigma^2). std::abs of every entry is
/// preserved bit for bit (the rotated value is snapped to the nearest point
/// with the original modulus).
ComplexMatrix apply_phase_jitter(const ComplexMatrix& x, double sigma, std::uint64_t seed,
                                 bool per_token = false);

/// x' = x (1 + eps), eps ~ N(0, tau^2) real. Phase is kept wherever 1 + eps > 0.
ComplexMatrix apply_amplitude_noise(const ComplexMatrix& x, double tau, std::uint64_t seed,
                                    bool additive = false);

/// Applies jitter then amplitude noise to every input with per-sample seeds.
Dataset apply_noise(const Dataset& ds, const NoiseSpec& noise);

// ---- container ------------------------------------------------------------------
//
// Binary layout (little-endian):
//   8 bytes   magic "HOLODS01"
//   u32       header length L
//   L bytes   JSON header {kind, n, seq_len, dim, num_classes, horizon, d_out,
//             seed, generator, params}
//   per sample: seq_len*dim (re, im) f64 pairs, then either an i64 label
//   (classification) or horizon*d_out (re, im) f64 pairs (regression).

void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

/// One row per entry: sample,role,t,c,re,im[,label].
void export_csv(const Dataset& ds, const std::filesystem::path& path);

}  // namespace holo
