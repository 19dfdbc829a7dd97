#include <algorithm>
#include <vector>

#include <benchmark/benchmark.h>

#include "pco/baselines.hpp"
#include "pco/density.hpp"
#include "pco/pair_sums.hpp"
#include "pco/rng.hpp"
#include "pco/selection.hpp"

namespace {

using namespace pco;

std::vector<double> sorted_normal(std::size_t n) {
  auto rng = make_stream(1, 0);
  const auto s = Density::standard_normal().sample(n, rng);
  std::vector<double> x(s.data().begin(), s.data().end());
  std::sort(x.begin(), x.end());
  return x;
}

// Args: n, sigma in units of 1e-3.
void gauss_sum(benchmark::State& state, GaussSumMethod method) {
  const auto x = sorted_normal(static_cast<std::size_t>(state.range(0)));
  const double sigma = static_cast<double>(state.range(1)) * 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_exp_sum_1d(x, sigma, method));
  state.SetComplexityN(state.range(0));
}

void BM_GaussSumDirect(benchmark::State& s) { gauss_sum(s, GaussSumMethod::direct); }
void BM_GaussSumFast(benchmark::State& s) { gauss_sum(s, GaussSumMethod::fast); }
void BM_GaussSumAuto(benchmark::State& s) { gauss_sum(s, GaussSumMethod::automatic); }

void sizes(benchmark::internal::Benchmark* b) {
  for (long n : {500, 2000, 8000})
    for (long sigma : {1, 10, 100, 1000}) b->Args({n, sigma});
}

BENCHMARK(BM_GaussSumDirect)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GaussSumFast)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GaussSumAuto)->Apply(sizes)->Unit(benchmark::kMicrosecond);

void BM_SelectBandwidth(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  auto rng = make_stream(2, 0);
  const auto s = Density::claw().sample(n, rng);
  const ProductKernel k(state.range(1) == 0 ? Kernel::gaussian() : Kernel::epanechnikov());
  const auto grid = BandwidthGrid::geometric(0.4 / static_cast<double>(n), 1.0, 30);
  for (auto _ : state) benchmark::DoNotOptimize(select_bandwidth(s, k, grid, {}).selected);
}
BENCHMARK(BM_SelectBandwidth)->ArgsProduct({{1000, 4000, 16000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_GlSelect(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  auto rng = make_stream(3, 0);
  const auto s = Density::claw().sample(n, rng);
  const ProductKernel k(Kernel::gaussian());
  const auto grid = BandwidthGrid::geometric(0.4 / static_cast<double>(n), 1.0, 30);
  for (auto _ : state) benchmark::DoNotOptimize(gl_select(s, k, grid, {}).index);
}
BENCHMARK(BM_GlSelect)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
