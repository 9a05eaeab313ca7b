#pragma once

#include <cstdint>
#include <string>
#include <vector>

// IPPP video source with feedback-triggered IDR insertion, packetization,
// and a receiver that tracks decodability and frozen-frame statistics.

namespace retrysim {

enum class FrameKind { idr, p };

struct VideoFrame {
  std::int64_t index = 0;
  FrameKind kind = FrameKind::p;
  std::int64_t bytes = 0;
  int packet_count = 0;
};

/// Split a frame into MAC packets: all payloads equal mtu_payload except
/// possibly the last. Rejects empty frames.
std::vector<int> packetize(std::int64_t frame_bytes, int mtu_payload);

struct TraceRecord {
  std::int64_t index = 0;
  FrameKind kind = FrameKind::p;
  std::int64_t bytes = 0;
};

// Per-frame byte sizes, either synthetic constants or replayed from a
// trace. A trace restarts from its leading IDR record at every IDR
// insertion and is consumed cyclically between insertions.
class FrameSizeSource {
 public:
  static FrameSizeSource synthetic(std::int64_t idr_bytes, std::int64_t p_bytes);
  static FrameSizeSource from_trace(std::vector<TraceRecord> records);
  /// Text trace, one record per line: frame_index,kind,bytes with kind I|P.
  static FrameSizeSource load_trace(const std::string& path);

  std::int64_t bytes_for(std::int64_t emit_index, std::int64_t last_idr_index,
                         FrameKind kind) const;

 private:
  FrameSizeSource() = default;
  bool synthetic_ = true;
  std::int64_t idr_bytes_ = 0;
  std::int64_t p_bytes_ = 0;
  std::vector<TraceRecord> records_;
};

class VideoEncoder {
 public:
  VideoEncoder(FrameSizeSource sizes, int mtu_payload);

  /// Emit the next frame: an IDR when feedback armed one (or for frame 0),
  /// a P frame otherwise.
  VideoFrame next_frame();

  /// Receiver loss report for the given frame. Reports older than the most
  /// recently emitted IDR are ignored; anything else arms an IDR for the
  /// next emission. Returns whether the report was accepted.
  bool on_feedback(std::int64_t lost_frame_index);

  std::int64_t scheduled_idr_index() const { return scheduled_idr_index_; }
  bool idr_pending() const { return pending_idr_; }
  std::int64_t frames_emitted() const { return next_index_; }
  std::int64_t idr_count() const { return idr_count_; }
  std::int64_t feedback_accepted() const { return feedback_accepted_; }

 private:
  FrameSizeSource sizes_;
  int mtu_payload_;
  std::int64_t next_index_ = 0;
  std::int64_t scheduled_idr_index_ = 0;
  bool pending_idr_ = false;
  std::int64_t idr_count_ = 0;
  std::int64_t feedback_accepted_ = 0;
};

struct FrozenStats {
  std::int64_t frozen = 0;
  std::int64_t total = 0;
  double fraction = 0.0;
  std::vector<std::int64_t> intervals;  // maximal frozen runs, in order
  bool tail_open = false;               // last run still growing at end of input
};

class VideoReceiver {
 public:
  enum class Display { fresh, frozen };

  /// Fold in one frame, in index order. A fully delivered IDR repairs the
  /// decode chain; any loss breaks it; a delivered P frame keeps it as is.
  Display ingest(std::int64_t frame_index, bool is_idr, bool all_packets_delivered);

  FrozenStats stats() const;

 private:
  bool clean_ = false;  // no IDR decoded yet
  std::int64_t next_index_ = 0;
  std::int64_t frozen_ = 0;
  std::int64_t total_ = 0;
  std::int64_t current_run_ = 0;
  std::vector<std::int64_t> completed_runs_;
};

}  // namespace retrysim
