#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "retrysim/analytic.hpp"
#include "retrysim/channel.hpp"
#include "retrysim/scheduler.hpp"

namespace retrysim {

enum class ChannelMode { abstract_channel, dcf };
enum class Method { baseline, proposed };

struct VideoSourceConfig {
  double fps = 30.0;
  std::int64_t n_frames = 295;
  std::int64_t idr_bytes = 23040;
  std::int64_t p_bytes = 4608;
  int mtu_payload = 2304;
  std::string trace;  // optional trace file; overrides the synthetic sizes
};

struct TimingConfig {
  double rtt_ms = 100.0;
  double detection_delay_ms = 0.0;
};

struct RunConfig {
  ChannelMode mode = ChannelMode::abstract_channel;
  Method method = Method::proposed;
  RetryPolicy policy{};
  VideoSourceConfig video{};
  TimingConfig timing{};
  double channel_p = 0.45;  // abstract mode collision probability
  DcfConfig dcf{};          // dcf mode; must contain one video_sender station
  std::uint64_t seed = 1;
  WindowMode window_mode = WindowMode::cumulative;
  std::size_t window_packets = 0;

  void validate() const;
  double feedback_delay_seconds() const {
    return (timing.rtt_ms + timing.detection_delay_ms) * 1e-3;
  }
  /// Frames spanned by one feedback delay; the frozen-interval length in
  /// the idealized model.
  int nominal_interval_frames() const;
  int video_station_index() const;  // dcf mode
  std::string scenario_label() const;
};

/// Parse a RunConfig from a JSON document; keys mirror the field names.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Cartesian sweep axes; empty axes are left at the base config's value.
struct SweepGrid {
  std::vector<double> p;
  std::vector<double> rtt_ms;
  std::vector<RetryPolicy> policies;
  std::vector<double> cross_rate_scale;  // dcf: scales poisson station rates

  bool empty() const {
    return p.empty() && rtt_ms.empty() && policies.empty() && cross_rate_scale.empty();
  }
};

/// Grid object from the same JSON document ("grid" key), if present.
SweepGrid parse_sweep_grid(const std::string& json_text);

/// Expand base x grid into one labelled config per grid point.
std::vector<RunConfig> expand_grid(const RunConfig& base, const SweepGrid& grid);

}  // namespace retrysim
