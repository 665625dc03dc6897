#include <benchmark/benchmark.h>

#include <random>

#include "holo/attention.hpp"
#include "holo/model.hpp"

namespace {

holo::ComplexMatrix random_complex(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  holo::ComplexMatrix m(r, c);
  for (auto& z : m.values()) z = {nd(rng), nd(rng)};
  return m;
}

void BM_HolographicAttention(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t dk = 8;
  std::mt19937_64 rng(1);
  auto q = random_complex(t, dk, rng), k = random_complex(t, dk, rng), v = random_complex(t, dk, rng);
  holo::AttentionConfig cfg;
  cfg.d_k = dk;
  for (auto _ : state) benchmark::DoNotOptimize(holo::holographic_attention(q, k, v, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HolographicAttention)->RangeMultiplier(2)->Range(16, 512)->Complexity(benchmark::oNSquared);

void BM_CosineAttention(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  auto q = random_complex(t, 8, rng), k = random_complex(t, 8, rng), v = random_complex(t, 8, rng);
  for (auto _ : state) benchmark::DoNotOptimize(holo::standard_cosine_attention(q, k, v));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CosineAttention)->RangeMultiplier(2)->Range(16, 512)->Complexity(benchmark::oNSquared);

void BM_AttentionBackward(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t dk = 8;
  std::mt19937_64 rng(3);
  auto q = random_complex(t, dk, rng), k = random_complex(t, dk, rng), v = random_complex(t, dk, rng);
  auto g = random_complex(t, dk, rng);
  holo::AttentionConfig cfg;
  cfg.d_k = dk;
  auto trace = holo::holographic_attention(q, k, v, cfg);
  for (auto _ : state)
    benchmark::DoNotOptimize(holo::holographic_attention_backward(q, k, v, trace, g, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AttentionBackward)->RangeMultiplier(2)->Range(16, 256)->Complexity(benchmark::oNSquared);

void BM_ModelPredict(benchmark::State& state) {
  holo::ModelConfig cfg;  // T=16, d_model=32, 4 heads, 2 layers
  auto params = holo::init_params(cfg, 0);
  std::mt19937_64 rng(4);
  auto x = random_complex(cfg.seq_len, cfg.d_in, rng);
  for (auto _ : state) benchmark::DoNotOptimize(holo::predict(x, params, cfg));
}
BENCHMARK(BM_ModelPredict);

}  // namespace

BENCHMARK_MAIN();
