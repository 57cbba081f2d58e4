#include <benchmark/benchmark.h>

#include "qconv/conversion.hpp"
#include "qconv/decomp.hpp"
#include "qconv/measures.hpp"
#include "qconv/robustness.hpp"
#include "qconv/states.hpp"

namespace {

using namespace qconv;

void BM_HermitianEigvals(benchmark::State& state) {
  const ComplexMatrix m = sample_mixed(1, 4).matrix();
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eigvals(m));
}
BENCHMARK(BM_HermitianEigvals);

void BM_Fidelity(benchmark::State& state) {
  const DensityMatrix a = sample_mixed(2, 4);
  const DensityMatrix b = sample_mixed(3, 3);
  for (auto _ : state) benchmark::DoNotOptimize(fidelity(a, b));
}
BENCHMARK(BM_Fidelity);

void BM_GeometricMixed(benchmark::State& state) {
  const DensityMatrix rho = sample_mixed(4, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(geometric_entanglement(rho));
}
BENCHMARK(BM_GeometricMixed)->DenseRange(1, 4);

void BM_GeometricBrute(benchmark::State& state) {
  const DensityMatrix rho = sample_mixed(5, 3);
  for (auto _ : state) benchmark::DoNotOptimize(geometric_entanglement_brute(rho));
}
BENCHMARK(BM_GeometricBrute)->Unit(benchmark::kMillisecond);

void BM_RobustnessSdp(benchmark::State& state) {
  const DensityMatrix rho = sample_mixed(6, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(generalized_robustness(rho, {1e-6}));
}
BENCHMARK(BM_RobustnessSdp)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_EqualGDecomposition(benchmark::State& state) {
  const DensityMatrix rho = sample_mixed(7, 4);
  for (auto _ : state) benchmark::DoNotOptimize(equal_g_decomposition(rho));
}
BENCHMARK(BM_EqualGDecomposition)->Unit(benchmark::kMicrosecond);

void BM_FidelityBallSampler(benchmark::State& state) {
  const DensityMatrix rho = sample_mixed(8, 3);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_fidelity_ball(rho, 0.9, 1000, ++seed));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_FidelityBallSampler)->Unit(benchmark::kMillisecond);

void BM_FidelityAtProbability(benchmark::State& state) {
  const PureState psi = pure_from_angle(0.01);
  const DensityMatrix rho = werner(0.9);
  for (auto _ : state) benchmark::DoNotOptimize(f_p(psi, rho, 0.5));
}
BENCHMARK(BM_FidelityAtProbability);

}  // namespace

BENCHMARK_MAIN();
