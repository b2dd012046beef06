#include "thetaforge/enumerate.hpp"
#include "thetaforge/kernels.hpp"
#include "thetaforge/lattice.hpp"
#include "thetaforge/random_lattice.hpp"
#include "thetaforge/rng.hpp"
#include "thetaforge/siegel.hpp"
#include "thetaforge/theta.hpp"

#include <benchmark/benchmark.h>

#include <cstdint>

namespace tf = thetaforge;

namespace {

tf::EuclideanLattice bench_lattice(int rank) {
  tf::SplitMix64 rng = tf::SplitMix64::stream(2024, static_cast<std::uint64_t>(rank));
  return tf::random_lattice(rng, rank, {});
}

tf::Backend backend_of(const benchmark::State& state) {
  return state.range(1) ? tf::Backend::parallel : tf::Backend::serial;
}

void BM_GaussianSum(benchmark::State& state) {
  const auto l = bench_lattice(static_cast<int>(state.range(0)));
  const double r2 = tf::tail_radius(l.rank(), 1.0, 1e-12).radius2;
  for (auto _ : state) benchmark::DoNotOptimize(tf::gaussian_sum(l, 1.0, r2, tf::kDefaultCountCap, backend_of(state)));
}

void BM_CountPoints(benchmark::State& state) {
  const auto l = bench_lattice(static_cast<int>(state.range(0)));
  const double r2 = 2.0 * l.rank();
  for (auto _ : state) {
    benchmark::DoNotOptimize(tf::count_points(l, r2, false, tf::kDefaultCountCap, backend_of(state)));
  }
}

void BM_SiegelSerial(benchmark::State& state) {
  const auto samples = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    double sum = 0.0;
    for (std::uint64_t i = 0; i < samples; ++i) {
      sum += tf::theta(tf::sample_lattice2(1, 0.0, i), 1.0, tf::kSiegelThetaTolerance, tf::Backend::serial).value;
    }
    benchmark::DoNotOptimize(sum);
  }
}

void BM_SiegelParallel(benchmark::State& state) {
  const auto samples = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tf::siegel_average_h0theta(0.0, samples, 1));
}

}  // namespace

BENCHMARK(BM_GaussianSum)->ArgsProduct({{4, 6, 8}, {0, 1}})->ArgNames({"rank", "parallel"});
BENCHMARK(BM_CountPoints)->ArgsProduct({{4, 6, 8}, {0, 1}})->ArgNames({"rank", "parallel"});
BENCHMARK(BM_SiegelSerial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SiegelParallel)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
