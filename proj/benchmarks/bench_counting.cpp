#include <benchmark/benchmark.h>

#include "curverat/counting.hpp"
#include "curverat/curve.hpp"

using namespace curverat;

static void BM_CountParabola(benchmark::State& state) {
  NearCurveQuery q{parabola()};
  q.Q = state.range(0);
  q.psi = ApproximatingFunction::power(0.6);
  q.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_near_curve(q).count);
  state.SetItemsProcessed(state.iterations() * q.Q * q.Q / 2);
}
BENCHMARK(BM_CountParabola)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_CountCircle(benchmark::State& state) {
  NearCurveQuery q{unit_circle_upper()};
  q.Q = state.range(0);
  q.psi = ApproximatingFunction::constant(0.01);
  q.I = {0.0, 0.9};
  q.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_near_curve(q).count);
}
BENCHMARK(BM_CountCircle)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_CountThreads(benchmark::State& state) {
  NearCurveQuery q{parabola()};
  q.Q = 4096;
  q.psi = ApproximatingFunction::power(0.6);
  q.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_near_curve(q).count);
}
BENCHMARK(BM_CountThreads)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
