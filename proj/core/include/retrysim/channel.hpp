#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

// Two transmission backends. BernoulliChannel draws independent per-attempt
// collisions at a fixed probability, matching the analytic model's
// assumption. DcfSimulator runs a slotted multi-station DCF with binary
// exponential backoff for cross-traffic experiments: in each slot every
// backlogged station whose backoff reached zero transmits; a lone
// transmitter succeeds, two or more collide; backoff counters freeze while
// the medium is busy.

namespace retrysim {

struct TxResult {
  bool delivered = false;
  int attempts = 0;
  double completion_time = 0.0;  // seconds; 0 when the backend has no clock
};

class BernoulliChannel {
 public:
  BernoulliChannel(double collision_probability, std::uint64_t seed);

  TxResult transmit(int retry_limit);
  double collision_probability() const { return p_; }

 private:
  double p_;
  std::mt19937_64 rng_;
};

enum class StationRole { video_sender, saturated_cross, poisson_cross };

struct StationConfig {
  StationRole role = StationRole::saturated_cross;
  double packet_rate_hz = 0.0;  // poisson_cross only
  int packet_bytes = 1500;      // self-generated traffic
  int retry_limit = 0;          // 0: use DcfConfig.default_retry
};

struct DcfConfig {
  std::vector<StationConfig> stations;
  int cw_min = 15;    // contention window values, form 2^k - 1
  int cw_max = 1023;
  double slot_time_us = 9.0;
  int header_slots = 6;          // preamble + SIFS + ACK, folded into each tx
  double bytes_per_slot = 130.0; // payload drain rate
  int default_retry = 7;
  int queue_limit = 1000;        // per-station FIFO bound

  void validate() const;
};

struct DcfPacket {
  int bytes = 0;
  int retry_limit = 0;
  std::uint64_t tag = 0;  // caller correlation id, echoed in completions
};

struct CompletedTx {
  std::uint64_t tag = 0;
  bool delivered = false;
  int attempts = 0;
  std::uint64_t completion_slot = 0;
  std::uint64_t submit_slot = 0;
};

struct DcfStationMetrics {
  std::uint64_t delivered_packets = 0;
  std::uint64_t delivered_bytes = 0;
  std::uint64_t attempts = 0;
  std::uint64_t collisions = 0;
  std::uint64_t drops = 0;        // retry limit exhausted
  std::uint64_t queue_drops = 0;  // FIFO overflow, never transmitted

  double measured_p() const {
    return attempts ? static_cast<double>(collisions) / static_cast<double>(attempts) : 0.0;
  }
};

class DcfSimulator {
 public:
  DcfSimulator(DcfConfig config, std::uint64_t seed);

  /// Queue a packet on a station. Returns false (and counts a queue drop)
  /// when the FIFO is full.
  bool submit(int station, DcfPacket packet);

  /// Advance the simulation to at least t_end seconds. A transmission in
  /// progress at the deadline runs to completion, so the clock may
  /// overshoot by one transmission duration.
  void run_until(double t_end_seconds);
  void run_until_slot(std::uint64_t end_slot);

  double now_seconds() const;
  std::uint64_t now_slots() const { return now_; }
  double slot_seconds() const { return config_.slot_time_us * 1e-6; }
  int tx_slots(int bytes) const;

  /// Completed transmissions (delivered or dropped) of a video-sender
  /// station since the previous drain, in completion order.
  std::vector<CompletedTx> drain_completions(int station);

  const DcfStationMetrics& station_metrics(int station) const;
  int station_count() const { return static_cast<int>(stations_.size()); }
  const DcfConfig& config() const { return config_; }

  /// Collided attempts over all attempts, all stations.
  double measured_p() const;

 private:
  struct Station {
    StationConfig cfg;
    std::mt19937_64 rng;
    std::deque<DcfPacket> queue;
    std::deque<std::uint64_t> enqueue_slots;
    bool self_generating = false;
    bool track_completions = false;
    int cw = 0;
    int backoff = -1;  // -1: nothing pending or not drawn yet
    int head_attempts = 0;
    double next_arrival_slot = 0.0;  // poisson only
    DcfStationMetrics metrics;
    std::vector<CompletedTx> completions;
  };

  void process_arrivals();
  void refill(Station& st);
  void draw_backoffs();
  void finish_packet(Station& st, bool delivered, std::uint64_t completion_slot);

  DcfConfig config_;
  std::vector<Station> stations_;
  std::uint64_t now_ = 0;
};

}  // namespace retrysim
