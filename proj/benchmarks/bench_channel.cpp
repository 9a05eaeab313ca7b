#include <benchmark/benchmark.h>

#include "retrysim/channel.hpp"

using namespace retrysim;

static void BM_BernoulliTransmit(benchmark::State& state) {
  BernoulliChannel ch(0.35, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ch.transmit(7));
  }
}
BENCHMARK(BM_BernoulliTransmit);

// Saturated stations contending; reports simulated slots per second.
static void BM_DcfSaturated(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t slots = 0;
  for (auto _ : state) {
    DcfConfig cfg;
    for (int i = 0; i < n; ++i) {
      cfg.stations.push_back({StationRole::saturated_cross, 0.0, 1500, 0});
    }
    DcfSimulator sim(cfg, 42);
    sim.run_until_slot(200000);
    slots += sim.now_slots();
    benchmark::DoNotOptimize(sim.measured_p());
  }
  state.counters["slots/s"] =
      benchmark::Counter(static_cast<double>(slots), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_DcfSaturated)->Arg(2)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);
