#include "retrysim/video.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace retrysim {

std::vector<int> packetize(std::int64_t frame_bytes, int mtu_payload) {
  if (mtu_payload <= 0) {
    throw std::invalid_argument("packetize: mtu_payload must be positive");
  }
  if (frame_bytes <= 0) {
    throw std::invalid_argument("packetize: frame must carry at least one byte");
  }
  std::vector<int> sizes;
  sizes.reserve(static_cast<size_t>((frame_bytes + mtu_payload - 1) / mtu_payload));
  std::int64_t remaining = frame_bytes;
  while (remaining > 0) {
    const int chunk = static_cast<int>(std::min<std::int64_t>(remaining, mtu_payload));
    sizes.push_back(chunk);
    remaining -= chunk;
  }
  return sizes;
}

FrameSizeSource FrameSizeSource::synthetic(std::int64_t idr_bytes, std::int64_t p_bytes) {
  if (idr_bytes <= 0 || p_bytes <= 0) {
    throw std::invalid_argument("FrameSizeSource: frame sizes must be positive");
  }
  FrameSizeSource s;
  s.synthetic_ = true;
  s.idr_bytes_ = idr_bytes;
  s.p_bytes_ = p_bytes;
  return s;
}

FrameSizeSource FrameSizeSource::from_trace(std::vector<TraceRecord> records) {
  if (records.empty()) {
    throw std::invalid_argument("FrameSizeSource: empty trace");
  }
  if (records.front().kind != FrameKind::idr) {
    throw std::invalid_argument("FrameSizeSource: trace must start with an I record");
  }
  for (const auto& r : records) {
    if (r.bytes <= 0) {
      throw std::invalid_argument("FrameSizeSource: trace record with non-positive size");
    }
  }
  FrameSizeSource s;
  s.synthetic_ = false;
  s.records_ = std::move(records);
  return s;
}

FrameSizeSource FrameSizeSource::load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("FrameSizeSource: cannot open trace file " + path);
  }
  std::vector<TraceRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    TraceRecord rec;
    std::string kind;
    char comma1 = 0;
    if (!(ss >> rec.index >> comma1) || comma1 != ',') {
      throw std::runtime_error("trace parse error at line " + std::to_string(line_no));
    }
    if (!std::getline(ss, kind, ',')) {
      throw std::runtime_error("trace parse error at line " + std::to_string(line_no));
    }
    // strip surrounding spaces
    const auto b = kind.find_first_not_of(" \t");
    const auto e = kind.find_last_not_of(" \t");
    kind = (b == std::string::npos) ? "" : kind.substr(b, e - b + 1);
    if (kind == "I") {
      rec.kind = FrameKind::idr;
    } else if (kind == "P") {
      rec.kind = FrameKind::p;
    } else {
      throw std::runtime_error("trace parse error at line " + std::to_string(line_no) +
                               ": kind must be I or P");
    }
    if (!(ss >> rec.bytes)) {
      throw std::runtime_error("trace parse error at line " + std::to_string(line_no));
    }
    records.push_back(rec);
  }
  return from_trace(std::move(records));
}

std::int64_t FrameSizeSource::bytes_for(std::int64_t emit_index,
                                        std::int64_t last_idr_index,
                                        FrameKind kind) const {
  if (synthetic_) {
    return kind == FrameKind::idr ? idr_bytes_ : p_bytes_;
  }
  if (kind == FrameKind::idr) {
    return records_.front().bytes;
  }
  const auto len = static_cast<std::int64_t>(records_.size());
  return records_[static_cast<size_t>((emit_index - last_idr_index) % len)].bytes;
}

VideoEncoder::VideoEncoder(FrameSizeSource sizes, int mtu_payload)
    : sizes_(std::move(sizes)), mtu_payload_(mtu_payload) {
  if (mtu_payload_ <= 0) {
    throw std::invalid_argument("VideoEncoder: mtu_payload must be positive");
  }
}

VideoFrame VideoEncoder::next_frame() {
  const bool is_idr = next_index_ == 0 || pending_idr_;
  if (is_idr) {
    scheduled_idr_index_ = next_index_;
    pending_idr_ = false;
    ++idr_count_;
  }
  VideoFrame frame;
  frame.index = next_index_;
  frame.kind = is_idr ? FrameKind::idr : FrameKind::p;
  frame.bytes = sizes_.bytes_for(next_index_, scheduled_idr_index_, frame.kind);
  frame.packet_count = static_cast<int>(packetize(frame.bytes, mtu_payload_).size());
  ++next_index_;
  return frame;
}

bool VideoEncoder::on_feedback(std::int64_t lost_frame_index) {
  // A loss older than the newest IDR sits inside an interval that IDR
  // already terminates; the rule is a strict less-than, so a loss in the
  // IDR frame itself does trigger a fresh insertion.
  if (lost_frame_index < scheduled_idr_index_) {
    return false;
  }
  pending_idr_ = true;
  ++feedback_accepted_;
  return true;
}

VideoReceiver::Display VideoReceiver::ingest(std::int64_t frame_index, bool is_idr,
                                             bool all_packets_delivered) {
  if (frame_index != next_index_) {
    throw std::invalid_argument("VideoReceiver: frames must be ingested in order");
  }
  ++next_index_;
  ++total_;
  if (!all_packets_delivered) {
    clean_ = false;
  } else if (is_idr) {
    clean_ = true;
  }
  if (clean_) {
    if (current_run_ > 0) {
      completed_runs_.push_back(current_run_);
      current_run_ = 0;
    }
    return Display::fresh;
  }
  ++frozen_;
  ++current_run_;
  return Display::frozen;
}

FrozenStats VideoReceiver::stats() const {
  FrozenStats s;
  s.frozen = frozen_;
  s.total = total_;
  s.fraction = total_ > 0 ? static_cast<double>(frozen_) / static_cast<double>(total_) : 0.0;
  s.intervals = completed_runs_;
  if (current_run_ > 0) {
    s.intervals.push_back(current_run_);
    s.tail_open = true;
  }
  return s;
}

}  // namespace retrysim
