#include <benchmark/benchmark.h>

#include "curverat/sieve.hpp"

using namespace curverat;

namespace {

SieveOptions no_cache(int threads) {
  SieveOptions o;
  o.use_cache = false;
  o.threads = threads;
  return o;
}

const SieveTable& shared_table() {
  static SieveTable t = SieveTable::build(std::uint64_t{1} << 26, no_cache(0));
  return t;
}

}  // namespace

static void BM_SieveBuild(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(SieveTable::build(n, no_cache(static_cast<int>(state.range(1)))));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SieveBuild)->Args({1 << 20, 1})->Args({1 << 24, 1})->Args({1 << 24, 0})->Unit(benchmark::kMillisecond);

static void BM_RangeSum(benchmark::State& state) {
  const auto& t = shared_table();
  std::uint64_t lo = 12345;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t.range_sum_r(lo, lo + static_cast<std::uint64_t>(state.range(0))));
    lo = (lo * 2654435761u) % (t.n_max() / 2);
  }
}
BENCHMARK(BM_RangeSum)->Arg(64)->Arg(1 << 16)->Arg(1 << 24);

static void BM_NearSquares(benchmark::State& state) {
  const auto& t = shared_table();
  auto psi = ApproximatingFunction::power(0.6);
  for (auto _ : state) benchmark::DoNotOptimize(sum_r_near_squares(static_cast<double>(state.range(0)), psi, t));
}
BENCHMARK(BM_NearSquares)->Arg(512)->Arg(2048)->Unit(benchmark::kMicrosecond);

static void BM_RhoCongruence(benchmark::State& state) {
  const auto& t = shared_table();
  std::uint64_t m = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rho_congruence(m, 7, &t));
    m = m % 1000000 + 1;
  }
}
BENCHMARK(BM_RhoCongruence);
