#include <benchmark/benchmark.h>

#include "retrysim/session.hpp"

using namespace retrysim;

namespace {

RunConfig abstract_config() {
  RunConfig cfg;
  cfg.mode = ChannelMode::abstract_channel;
  cfg.channel_p = 0.45;
  cfg.policy = RetryPolicy{8, 7, 1, 7};
  cfg.video = VideoSourceConfig{30.0, 295, 23040, 4608, 2304, ""};
  cfg.timing = TimingConfig{100.0, 0.0};
  return cfg;
}

}  // namespace

static void BM_SessionAbstract(benchmark::State& state) {
  RunConfig cfg = abstract_config();
  cfg.method = state.range(0) ? Method::proposed : Method::baseline;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(run_session(cfg));
  }
}
BENCHMARK(BM_SessionAbstract)->Arg(0)->Arg(1);

static void BM_SessionDcf(benchmark::State& state) {
  RunConfig cfg = abstract_config();
  cfg.mode = ChannelMode::dcf;
  cfg.dcf.stations = {
      {StationRole::video_sender, 0.0, 2304, 0},
      {StationRole::saturated_cross, 0.0, 1500, 0},
      {StationRole::saturated_cross, 0.0, 1500, 0},
      {StationRole::poisson_cross, 200.0, 500, 0},
      {StationRole::poisson_cross, 200.0, 500, 0},
  };
  cfg.method = Method::proposed;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(run_session(cfg));
  }
}
BENCHMARK(BM_SessionDcf)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
