#include "retrysim/session.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "retrysim/scheduler.hpp"

namespace retrysim {

namespace {

struct FeedbackEvent {
  std::int64_t effective_at = 0;  // frame index (abstract) or slot (dcf)
  std::int64_t lost_frame = 0;
};

struct SessionCounters {
  std::uint64_t packets_by_priority[3] = {0, 0, 0};
  std::uint64_t drops_by_priority[3] = {0, 0, 0};
  std::uint64_t packets_sent = 0;
  std::int64_t idr_frames = 0;
  std::int64_t p_frames = 0;
  std::uint64_t idr_packets = 0;
  std::uint64_t p_packets = 0;

  void count_frame(const VideoFrame& frame) {
    if (frame.kind == FrameKind::idr) {
      ++idr_frames;
      idr_packets += static_cast<std::uint64_t>(frame.packet_count);
    } else {
      ++p_frames;
      p_packets += static_cast<std::uint64_t>(frame.packet_count);
    }
  }
};

FrameSizeSource make_size_source(const VideoSourceConfig& video) {
  if (!video.trace.empty()) {
    return FrameSizeSource::load_trace(video.trace);
  }
  return FrameSizeSource::synthetic(video.idr_bytes, video.p_bytes);
}

SchedulerConfig make_scheduler_config(const RunConfig& cfg) {
  SchedulerConfig sc;
  sc.policy = cfg.policy;
  sc.window_mode = cfg.window_mode;
  sc.window_packets = cfg.window_packets;
  return sc;
}

DelaySummary summarize_delays(std::vector<double>& delays) {
  DelaySummary s;
  s.samples = delays.size();
  if (delays.empty()) return s;
  std::sort(delays.begin(), delays.end());
  auto rank = [&](double q) {
    const auto idx = static_cast<size_t>(std::ceil(q * delays.size())) - 1;
    return delays[std::min(idx, delays.size() - 1)];
  };
  s.p50 = rank(0.50);
  s.p90 = rank(0.90);
  s.p99 = rank(0.99);
  return s;
}

void fill_common_metrics(RunMetrics& m, const FrameScheduler& sched,
                         const SessionCounters& counters, const VideoEncoder& enc,
                         const VideoReceiver& recv) {
  m.frozen = recv.stats();
  m.m1 = counters.packets_by_priority[0];
  m.m2 = counters.packets_by_priority[1];
  m.m3 = counters.packets_by_priority[2];
  m.packets_sent = counters.packets_sent;
  m.attempts_total = sched.attempts_total();
  m.collisions_total = sched.collisions_total();
  m.drops_total = sched.drops_total();
  m.measured_p = sched.p_hat();
  m.idr_frames_generated = enc.idr_count();
  m.feedback_accepted = enc.feedback_accepted();
  m.priority1_drops = counters.drops_by_priority[0];
  m.measured_idr_packets =
      counters.idr_frames ? static_cast<double>(counters.idr_packets) / counters.idr_frames : 0.0;
  m.measured_p_packets =
      counters.p_frames ? static_cast<double>(counters.p_packets) / counters.p_frames : 0.0;
  std::int64_t completed = static_cast<std::int64_t>(m.frozen.intervals.size());
  if (m.frozen.tail_open) --completed;
  m.completed_intervals = completed;
  if (completed > 0) {
    std::int64_t frames = 0;
    for (std::int64_t i = 0; i < completed; ++i) frames += m.frozen.intervals[i];
    m.measured_interval = static_cast<double>(frames) / completed;
  }
  m.p0_hat = m.packets_sent ? static_cast<double>(m.drops_total) / m.packets_sent : 0.0;
  m.p1_hat = m.m1 ? static_cast<double>(m.priority1_drops) / m.m1 : 0.0;
}

RunMetrics run_abstract(const RunConfig& cfg) {
  BernoulliChannel channel(cfg.channel_p, cfg.seed);
  FrameScheduler sched(make_scheduler_config(cfg));
  VideoEncoder enc(make_size_source(cfg.video), cfg.video.mtu_payload);
  VideoReceiver recv;
  SessionCounters counters;
  RunMetrics metrics;

  const bool proposed = cfg.method == Method::proposed;
  const std::int64_t fb_frames = cfg.nominal_interval_frames();
  std::deque<FeedbackEvent> events;

  for (std::int64_t k = 0; k < cfg.video.n_frames; ++k) {
    while (!events.empty() && events.front().effective_at <= k) {
      enc.on_feedback(events.front().lost_frame);
      events.pop_front();
    }
    const VideoFrame frame = enc.next_frame();
    counters.count_frame(frame);
    const bool is_idr = frame.kind == FrameKind::idr;
    const Priority q = proposed ? sched.classify_frame(is_idr) : Priority::standard;
    const int prio_idx = static_cast<int>(q) - 1;

    bool all_delivered = true;
    bool loss_reported = false;
    for (int i = 0; i < frame.packet_count; ++i) {
      const int limit = sched.register_packet(q);
      ++counters.packets_by_priority[prio_idx];
      ++counters.packets_sent;
      const TxResult tx = channel.transmit(limit);
      sched.record_transmission_result(tx.attempts, tx.delivered, limit);
      if (!tx.delivered) {
        ++counters.drops_by_priority[prio_idx];
        all_delivered = false;
        if (!loss_reported) {
          loss_reported = true;
          events.push_back({k + fb_frames, k});
          ++metrics.feedback_events;
        }
      }
    }
    recv.ingest(k, is_idr, all_delivered);
  }

  fill_common_metrics(metrics, sched, counters, enc, recv);
  metrics.duration_seconds = cfg.video.n_frames / cfg.video.fps;
  return metrics;
}

struct PendingFrame {
  std::int64_t index = 0;
  bool is_idr = false;
  int outstanding = 0;
  bool any_loss = false;
};

struct PacketMeta {
  std::int64_t frame = 0;
  int limit = 0;
  int prio_idx = 0;
  std::uint64_t tag = 0;
};

RunMetrics run_dcf(const RunConfig& cfg) {
  DcfSimulator sim(cfg.dcf, cfg.seed);
  const int vid = cfg.video_station_index();
  FrameScheduler sched(make_scheduler_config(cfg));
  VideoEncoder enc(make_size_source(cfg.video), cfg.video.mtu_payload);
  VideoReceiver recv;
  SessionCounters counters;
  RunMetrics metrics;

  const bool proposed = cfg.method == Method::proposed;
  const double slot_s = sim.slot_seconds();
  const double period_slots = (1.0 / cfg.video.fps) / slot_s;
  const auto frame_slot = [&](std::int64_t k) {
    return static_cast<std::uint64_t>(k * period_slots);
  };
  const auto fb_slots =
      static_cast<std::uint64_t>(std::ceil(cfg.feedback_delay_seconds() / slot_s - 1e-9));

  std::deque<FeedbackEvent> events;
  std::deque<PendingFrame> pending;
  std::deque<PacketMeta> in_flight;
  std::vector<double> delays;
  std::vector<std::int64_t> frame_first_loss;  // frames whose loss is already reported
  std::uint64_t next_tag = 1;

  auto report_loss = [&](std::int64_t frame, std::uint64_t at_slot) {
    for (std::int64_t f : frame_first_loss) {
      if (f == frame) return;
    }
    frame_first_loss.push_back(frame);
    if (frame_first_loss.size() > 64) frame_first_loss.erase(frame_first_loss.begin());
    events.push_back({static_cast<std::int64_t>(at_slot + fb_slots), frame});
    ++metrics.feedback_events;
  };

  auto drain = [&]() {
    for (const CompletedTx& done : sim.drain_completions(vid)) {
      if (in_flight.empty() || in_flight.front().tag != done.tag) {
        throw std::runtime_error("run_session: completion order broke");
      }
      const PacketMeta meta = in_flight.front();
      in_flight.pop_front();
      sched.record_transmission_result(done.attempts, done.delivered, meta.limit);
      if (done.delivered) {
        delays.push_back((done.completion_slot - done.submit_slot) * slot_s);
      } else {
        ++counters.drops_by_priority[meta.prio_idx];
        report_loss(meta.frame, done.completion_slot);
      }
      for (auto& pf : pending) {
        if (pf.index == meta.frame) {
          --pf.outstanding;
          pf.any_loss = pf.any_loss || !done.delivered;
          break;
        }
      }
      while (!pending.empty() && pending.front().outstanding == 0) {
        recv.ingest(pending.front().index, pending.front().is_idr, !pending.front().any_loss);
        pending.pop_front();
      }
    }
  };

  for (std::int64_t k = 0; k < cfg.video.n_frames; ++k) {
    const std::uint64_t t = frame_slot(k);
    if (t > sim.now_slots()) sim.run_until_slot(t);
    drain();
    while (!events.empty() &&
           events.front().effective_at <= static_cast<std::int64_t>(t)) {
      enc.on_feedback(events.front().lost_frame);
      events.pop_front();
    }

    const VideoFrame frame = enc.next_frame();
    counters.count_frame(frame);
    const bool is_idr = frame.kind == FrameKind::idr;
    const Priority q = proposed ? sched.classify_frame(is_idr) : Priority::standard;
    const int prio_idx = static_cast<int>(q) - 1;

    PendingFrame pf;
    pf.index = frame.index;
    pf.is_idr = is_idr;
    for (int size : packetize(frame.bytes, cfg.video.mtu_payload)) {
      const int limit = sched.register_packet(q);
      ++counters.packets_by_priority[prio_idx];
      ++counters.packets_sent;
      const std::uint64_t tag = next_tag++;
      if (sim.submit(vid, {size, limit, tag})) {
        in_flight.push_back({frame.index, limit, prio_idx, tag});
        ++pf.outstanding;
      } else {
        pf.any_loss = true;  // FIFO overflow, the packet never reaches the air
        report_loss(frame.index, sim.now_slots());
      }
    }
    pending.push_back(pf);
    while (!pending.empty() && pending.front().outstanding == 0) {
      recv.ingest(pending.front().index, pending.front().is_idr, !pending.front().any_loss);
      pending.pop_front();
    }
  }

  // Cover the nominal video duration, then let the queue drain.
  sim.run_until_slot(frame_slot(cfg.video.n_frames));
  drain();
  const std::uint64_t drain_deadline =
      frame_slot(cfg.video.n_frames) + static_cast<std::uint64_t>(2000 * period_slots);
  while (!in_flight.empty()) {
    if (sim.now_slots() > drain_deadline) {
      throw std::runtime_error("run_session: video queue failed to drain");
    }
    sim.run_until_slot(sim.now_slots() + 20000);
    drain();
  }
  if (!pending.empty()) {
    throw std::runtime_error("run_session: frames left unresolved");
  }

  fill_common_metrics(metrics, sched, counters, enc, recv);
  metrics.duration_seconds =
      std::max(sim.now_seconds(), cfg.video.n_frames / cfg.video.fps);
  metrics.video_delay = summarize_delays(delays);
  for (int s = 0; s < sim.station_count(); ++s) {
    const DcfStationMetrics& sm = sim.station_metrics(s);
    StationThroughput st;
    st.station = s;
    st.role = cfg.dcf.stations[static_cast<size_t>(s)].role;
    st.delivered_bytes = sm.delivered_bytes;
    st.throughput_bps = sm.delivered_bytes / metrics.duration_seconds;
    st.attempts = sm.attempts;
    st.collisions = sm.collisions;
    metrics.stations.push_back(st);
  }
  return metrics;
}

}  // namespace

RunMetrics run_session(const RunConfig& config) {
  config.validate();
  if (config.mode == ChannelMode::abstract_channel) {
    return run_abstract(config);
  }
  return run_dcf(config);
}

}  // namespace retrysim
