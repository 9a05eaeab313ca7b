#include "retrysim/scheduler.hpp"

#include <stdexcept>

namespace retrysim {

Priority classify_rule(int previous_priority, bool is_idr, bool last_frame_dropped,
                       bool compatibility_ok) {
  if (is_idr) return Priority::high;
  if (previous_priority == 3) return Priority::low;
  if (last_frame_dropped) return Priority::low;
  if (previous_priority == 2) return Priority::standard;
  if (compatibility_ok) return Priority::high;
  return Priority::standard;
}

void SchedulerConfig::validate() const {
  policy.validate();
  if (window_mode == WindowMode::sliding && window_packets == 0) {
    throw std::invalid_argument("SchedulerConfig: sliding window needs window_packets > 0");
  }
}

FrameScheduler::FrameScheduler(SchedulerConfig config) : config_(config) {
  config_.validate();
}

Priority FrameScheduler::classify_frame(bool is_idr) {
  const Priority q =
      classify_rule(previous_priority_, is_idr, last_frame_dropped_, compatibility_ok());
  previous_priority_ = static_cast<int>(q);
  last_frame_dropped_ = false;
  return q;
}

int FrameScheduler::register_packet(Priority q) {
  const int idx = static_cast<int>(q) - 1;
  ++m_[idx];
  if (config_.window_mode == WindowMode::sliding) {
    recent_.push_back(idx);
    while (recent_.size() > config_.window_packets) {
      --m_[recent_.front()];
      recent_.pop_front();
    }
  }
  return config_.policy.limit_for(static_cast<int>(q));
}

void FrameScheduler::record_transmission_result(int attempts_made, bool delivered,
                                                int retry_limit) {
  if (attempts_made < 1 || attempts_made > retry_limit) {
    throw std::invalid_argument("record_transmission_result: attempts out of range");
  }
  if (!delivered && attempts_made != retry_limit) {
    throw std::invalid_argument(
        "record_transmission_result: drop must exhaust the retry limit");
  }
  attempts_total_ += static_cast<std::uint64_t>(attempts_made);
  collisions_total_ += static_cast<std::uint64_t>(delivered ? attempts_made - 1 : attempts_made);
  if (!delivered) {
    ++drops_total_;
    last_frame_dropped_ = true;
  }
}

bool FrameScheduler::compatibility_ok() const {
  const double p = p_hat();
  const RetryPolicy& pol = config_.policy;
  const double total = static_cast<double>(m_[0] + m_[1] + m_[2]);
  // The common 1/(1-p) factor cancels on both sides.
  const double lhs = (1.0 - pow_int(p, pol.r_base)) * total;
  const double rhs = (1.0 - pow_int(p, pol.r1)) * static_cast<double>(m_[0]) +
                     (1.0 - pow_int(p, pol.r2)) * static_cast<double>(m_[1]) +
                     (1.0 - pow_int(p, pol.r3)) * static_cast<double>(m_[2]);
  return lhs >= rhs;
}

void FrameScheduler::reset_window() {
  m_[0] = m_[1] = m_[2] = 0;
  recent_.clear();
  if (config_.reset_attempts_with_window) {
    attempts_total_ = 0;
    collisions_total_ = 0;
  }
}

double FrameScheduler::p_hat() const {
  if (attempts_total_ == 0) return 0.0;
  return static_cast<double>(collisions_total_) / static_cast<double>(attempts_total_);
}

}  // namespace retrysim
