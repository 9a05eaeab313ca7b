#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>

#include "retrysim/analytic.hpp"

// Per-frame priority classification and per-packet retry-limit assignment
// at the sender MAC. One scheduler instance owns one sender's state; it
// tracks the per-class packet counters, an online collision-probability
// estimate, and the drop flag that demotes the frames following a loss.

namespace retrysim {

enum class Priority : int {
  high = 1,      // IDR frames and the clean run that follows them
  standard = 2,  // the fixed-limit class, identical to an unmodified sender
  low = 3,       // frames inside a frozen interval
};

/// The frame classification rule as an ordered decision list:
/// IDR -> 1; previous == 3 -> 3; drop in previous frame -> 3;
/// previous == 2 -> 2; compatibility holds -> 1; otherwise 2.
/// previous_priority is 0 before the first frame.
Priority classify_rule(int previous_priority, bool is_idr, bool last_frame_dropped,
                       bool compatibility_ok);

enum class WindowMode { cumulative, sliding };

struct SchedulerConfig {
  RetryPolicy policy{};
  WindowMode window_mode = WindowMode::cumulative;
  std::size_t window_packets = 0;  // sliding mode: counters cover this many packets
  // reset_window() clears the attempt/collision counters too when set.
  bool reset_attempts_with_window = false;

  void validate() const;
};

class FrameScheduler {
 public:
  explicit FrameScheduler(SchedulerConfig config);

  /// Classify the next frame; fixes the priority for every packet of the
  /// frame and consumes the pending drop flag.
  Priority classify_frame(bool is_idr);

  /// Count one packet of priority q; returns the retry limit to use.
  int register_packet(Priority q);

  /// Fold one MAC transmission outcome into the collision estimate. An
  /// undelivered packet must have exhausted its retry limit and marks the
  /// current frame as dropped.
  void record_transmission_result(int attempts_made, bool delivered, int retry_limit);

  /// Compatibility inequality on the current counters and estimate:
  /// (1 - p^R) * (M1+M2+M3) >= sum_i (1 - p^Ri) * Mi, equality counts.
  bool compatibility_ok() const;

  /// Start a new measurement interval: zero the packet counters (and the
  /// attempt counters when configured); classification state is preserved.
  void reset_window();

  double p_hat() const;
  std::uint64_t m1() const { return m_[0]; }
  std::uint64_t m2() const { return m_[1]; }
  std::uint64_t m3() const { return m_[2]; }
  std::uint64_t attempts_total() const { return attempts_total_; }
  std::uint64_t collisions_total() const { return collisions_total_; }
  std::uint64_t drops_total() const { return drops_total_; }
  int previous_priority() const { return previous_priority_; }
  bool last_frame_dropped() const { return last_frame_dropped_; }
  const RetryPolicy& policy() const { return config_.policy; }

 private:
  SchedulerConfig config_;
  int previous_priority_ = 0;  // 0 until the first frame is classified
  bool last_frame_dropped_ = false;
  std::uint64_t m_[3] = {0, 0, 0};
  std::uint64_t attempts_total_ = 0;
  std::uint64_t collisions_total_ = 0;
  std::uint64_t drops_total_ = 0;
  std::deque<int> recent_;  // registration order, sliding mode only
};

}  // namespace retrysim
