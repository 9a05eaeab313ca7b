#include <benchmark/benchmark.h>

#include "retrysim/analytic.hpp"

using namespace retrysim;

static void BM_ExpectedAttempts(benchmark::State& state) {
  double p = 0.0;
  for (auto _ : state) {
    p += 1e-9;
    benchmark::DoNotOptimize(expected_attempts(0.35 + p, 7));
  }
}
BENCHMARK(BM_ExpectedAttempts);

static void BM_StationaryClosedForm(benchmark::State& state) {
  const VideoModelParams vp{10, 2, static_cast<int>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(stationary_closed_form(vp, 0.01));
  }
}
BENCHMARK(BM_StationaryClosedForm)->Arg(3)->Arg(12);

static void BM_StationaryNumeric(benchmark::State& state) {
  const VideoModelParams vp{10, 2, static_cast<int>(state.range(0))};
  const TransitionMatrix m = markov_transition_matrix(vp, 0.01);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stationary_numeric(m));
  }
  state.SetLabel(std::to_string(m.size()) + " states");
}
BENCHMARK(BM_StationaryNumeric)->Arg(3)->Arg(12);

static void BM_BianchiFixedPoint(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(bianchi_fixed_point(static_cast<int>(state.range(0)), 16, 6, 7));
  }
}
BENCHMARK(BM_BianchiFixedPoint)->Arg(5)->Arg(50);
