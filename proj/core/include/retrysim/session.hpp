#pragma once

#include <cstdint>
#include <vector>

#include "retrysim/config.hpp"
#include "retrysim/video.hpp"

namespace retrysim {

struct StationThroughput {
  int station = 0;
  StationRole role = StationRole::saturated_cross;
  std::uint64_t delivered_bytes = 0;
  double throughput_bps = 0.0;  // bytes per second
  std::uint64_t attempts = 0;
  std::uint64_t collisions = 0;
};

struct DelaySummary {
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;
  std::uint64_t samples = 0;
};

struct RunMetrics {
  FrozenStats frozen;
  std::uint64_t m1 = 0, m2 = 0, m3 = 0;
  std::uint64_t packets_sent = 0;
  std::uint64_t attempts_total = 0;
  std::uint64_t collisions_total = 0;
  std::uint64_t drops_total = 0;
  double measured_p = 0.0;  // video sender, collided attempts / attempts
  std::int64_t idr_frames_generated = 0;
  std::int64_t feedback_events = 0;
  std::int64_t feedback_accepted = 0;
  std::uint64_t priority1_drops = 0;

  // Parameters measured from the run, feeding the analytic bound.
  double measured_idr_packets = 0.0;    // mean packets per IDR frame
  double measured_p_packets = 0.0;      // mean packets per P frame
  double measured_interval = 0.0;       // mean completed frozen-run length
  std::int64_t completed_intervals = 0;
  double p0_hat = 0.0;  // drops / packets
  double p1_hat = 0.0;  // priority-1 drops / m1

  // dcf mode only.
  std::vector<StationThroughput> stations;
  DelaySummary video_delay;
  double duration_seconds = 0.0;
};

/// Run one seeded closed-loop session: every frame period the encoder
/// emits a frame (an IDR when armed by feedback), the scheduler assigns
/// its priority and per-packet retry limits (baseline runs pin every
/// packet to the fixed limit), packets traverse the configured channel,
/// MAC outcomes feed the collision estimate and drop flag, the receiver
/// tracks frozen frames, and each frame's first loss schedules a feedback
/// event one feedback delay later.
RunMetrics run_session(const RunConfig& config);

}  // namespace retrysim
