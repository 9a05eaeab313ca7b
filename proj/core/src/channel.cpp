#include "retrysim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace retrysim {

BernoulliChannel::BernoulliChannel(double collision_probability, std::uint64_t seed)
    : p_(collision_probability), rng_(seed) {
  if (!(p_ >= 0.0 && p_ <= 1.0)) {
    throw std::invalid_argument("BernoulliChannel: probability must be in [0, 1]");
  }
}

TxResult BernoulliChannel::transmit(int retry_limit) {
  if (retry_limit < 1) {
    throw std::invalid_argument("BernoulliChannel: retry_limit must be >= 1");
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TxResult result;
  for (int attempt = 1; attempt <= retry_limit; ++attempt) {
    result.attempts = attempt;
    if (u(rng_) >= p_) {
      result.delivered = true;
      return result;
    }
  }
  result.delivered = false;
  return result;
}

namespace {

bool is_cw_value(int v) {
  // Contention windows take the form 2^k - 1.
  return v >= 0 && ((static_cast<unsigned>(v) + 1) & static_cast<unsigned>(v)) == 0;
}

}  // namespace

void DcfConfig::validate() const {
  if (stations.empty()) {
    throw std::invalid_argument("DcfConfig: at least one station required");
  }
  if (!is_cw_value(cw_min) || !is_cw_value(cw_max) || cw_min > cw_max) {
    throw std::invalid_argument("DcfConfig: cw bounds must be of form 2^k - 1 with cw_min <= cw_max");
  }
  if (slot_time_us <= 0 || bytes_per_slot <= 0 || header_slots < 0) {
    throw std::invalid_argument("DcfConfig: bad timing parameters");
  }
  if (default_retry < 1 || queue_limit < 1) {
    throw std::invalid_argument("DcfConfig: bad retry/queue parameters");
  }
  for (const auto& st : stations) {
    if (st.packet_bytes <= 0) {
      throw std::invalid_argument("DcfConfig: station packet size must be positive");
    }
    if (st.role == StationRole::poisson_cross && st.packet_rate_hz < 0) {
      throw std::invalid_argument("DcfConfig: negative arrival rate");
    }
    if (st.retry_limit < 0) {
      throw std::invalid_argument("DcfConfig: negative retry limit");
    }
  }
}

DcfSimulator::DcfSimulator(DcfConfig config, std::uint64_t seed)
    : config_(std::move(config)) {
  config_.validate();
  stations_.resize(config_.stations.size());
  for (size_t i = 0; i < stations_.size(); ++i) {
    Station& st = stations_[i];
    st.cfg = config_.stations[i];
    // Decoupled per-station streams keep cross traffic identical across
    // paired runs that only change the video sender's behaviour.
    st.rng.seed(seed + 0x9E3779B97F4A7C15ULL * (i + 1));
    st.self_generating = st.cfg.role != StationRole::video_sender;
    st.track_completions = st.cfg.role == StationRole::video_sender;
    st.cw = config_.cw_min;
    if (st.cfg.role == StationRole::poisson_cross && st.cfg.packet_rate_hz > 0) {
      std::exponential_distribution<double> gap(st.cfg.packet_rate_hz * slot_seconds());
      st.next_arrival_slot = gap(st.rng);
    } else {
      st.next_arrival_slot = std::numeric_limits<double>::infinity();
    }
    if (st.cfg.role == StationRole::saturated_cross) {
      refill(st);
    }
  }
}

int DcfSimulator::tx_slots(int bytes) const {
  const int payload = static_cast<int>(std::ceil(bytes / config_.bytes_per_slot));
  return config_.header_slots + std::max(payload, 1);
}

bool DcfSimulator::submit(int station, DcfPacket packet) {
  Station& st = stations_.at(static_cast<size_t>(station));
  if (packet.bytes <= 0) {
    throw std::invalid_argument("DcfSimulator: packet must carry bytes");
  }
  if (packet.retry_limit < 1) {
    packet.retry_limit = config_.default_retry;
  }
  if (static_cast<int>(st.queue.size()) >= config_.queue_limit) {
    ++st.metrics.queue_drops;
    return false;
  }
  st.queue.push_back(packet);
  st.enqueue_slots.push_back(now_);
  return true;
}

void DcfSimulator::refill(Station& st) {
  if (st.queue.empty()) {
    st.queue.push_back({st.cfg.packet_bytes,
                        st.cfg.retry_limit > 0 ? st.cfg.retry_limit : config_.default_retry,
                        0});
    st.enqueue_slots.push_back(now_);
  }
}

void DcfSimulator::process_arrivals() {
  for (Station& st : stations_) {
    if (st.cfg.role == StationRole::saturated_cross) {
      refill(st);
      continue;
    }
    if (st.cfg.role != StationRole::poisson_cross) continue;
    while (st.next_arrival_slot <= static_cast<double>(now_)) {
      if (static_cast<int>(st.queue.size()) < config_.queue_limit) {
        st.queue.push_back({st.cfg.packet_bytes,
                            st.cfg.retry_limit > 0 ? st.cfg.retry_limit : config_.default_retry,
                            0});
        st.enqueue_slots.push_back(static_cast<std::uint64_t>(st.next_arrival_slot));
      } else {
        ++st.metrics.queue_drops;
      }
      std::exponential_distribution<double> gap(st.cfg.packet_rate_hz * slot_seconds());
      st.next_arrival_slot += gap(st.rng);
    }
  }
}

void DcfSimulator::draw_backoffs() {
  for (Station& st : stations_) {
    if (!st.queue.empty() && st.backoff < 0) {
      std::uniform_int_distribution<int> u(0, st.cw);
      st.backoff = u(st.rng);
    }
  }
}

void DcfSimulator::finish_packet(Station& st, bool delivered, std::uint64_t completion_slot) {
  const DcfPacket& pkt = st.queue.front();
  if (delivered) {
    ++st.metrics.delivered_packets;
    st.metrics.delivered_bytes += static_cast<std::uint64_t>(pkt.bytes);
  } else {
    ++st.metrics.drops;
  }
  if (st.track_completions) {
    st.completions.push_back(
        {pkt.tag, delivered, st.head_attempts, completion_slot, st.enqueue_slots.front()});
  }
  st.queue.pop_front();
  st.enqueue_slots.pop_front();
  st.head_attempts = 0;
  st.cw = config_.cw_min;
  st.backoff = -1;
}

void DcfSimulator::run_until(double t_end_seconds) {
  if (t_end_seconds < now_seconds()) {
    throw std::invalid_argument("DcfSimulator: cannot run backwards");
  }
  run_until_slot(static_cast<std::uint64_t>(std::ceil(t_end_seconds / slot_seconds())));
}

void DcfSimulator::run_until_slot(std::uint64_t end_slot) {
  while (now_ < end_slot) {
    process_arrivals();
    draw_backoffs();

    int transmitters = 0;
    int longest = 0;
    for (Station& st : stations_) {
      if (!st.queue.empty() && st.backoff == 0) {
        ++transmitters;
        longest = std::max(longest, st.queue.front().bytes);
      }
    }

    if (transmitters == 0) {
      // Idle: jump to the next backoff expiry or arrival.
      std::uint64_t jump = end_slot - now_;
      for (const Station& st : stations_) {
        if (!st.queue.empty() && st.backoff > 0) {
          jump = std::min(jump, static_cast<std::uint64_t>(st.backoff));
        }
        if (std::isfinite(st.next_arrival_slot)) {
          const double gap = st.next_arrival_slot - static_cast<double>(now_);
          const auto slots = static_cast<std::uint64_t>(std::max(1.0, std::ceil(gap)));
          jump = std::min(jump, slots);
        }
      }
      for (Station& st : stations_) {
        if (!st.queue.empty() && st.backoff > 0) {
          st.backoff -= static_cast<int>(std::min<std::uint64_t>(jump, st.backoff));
        }
      }
      now_ += jump;
      continue;
    }

    const auto duration = static_cast<std::uint64_t>(tx_slots(longest));
    const std::uint64_t completion = now_ + duration;
    for (Station& st : stations_) {
      if (st.queue.empty() || st.backoff != 0) continue;
      ++st.metrics.attempts;
      ++st.head_attempts;
      if (transmitters == 1) {
        finish_packet(st, true, completion);
      } else {
        ++st.metrics.collisions;
        if (st.head_attempts >= st.queue.front().retry_limit) {
          finish_packet(st, false, completion);
        } else {
          st.cw = std::min(2 * (st.cw + 1) - 1, config_.cw_max);
          std::uniform_int_distribution<int> u(0, st.cw);
          st.backoff = u(st.rng);
        }
      }
    }
    now_ = completion;
  }
}

double DcfSimulator::now_seconds() const {
  return static_cast<double>(now_) * slot_seconds();
}

std::vector<CompletedTx> DcfSimulator::drain_completions(int station) {
  Station& st = stations_.at(static_cast<size_t>(station));
  std::vector<CompletedTx> out;
  out.swap(st.completions);
  return out;
}

const DcfStationMetrics& DcfSimulator::station_metrics(int station) const {
  return stations_.at(static_cast<size_t>(station)).metrics;
}

double DcfSimulator::measured_p() const {
  std::uint64_t attempts = 0, collisions = 0;
  for (const Station& st : stations_) {
    attempts += st.metrics.attempts;
    collisions += st.metrics.collisions;
  }
  return attempts ? static_cast<double>(collisions) / static_cast<double>(attempts) : 0.0;
}

}  // namespace retrysim
