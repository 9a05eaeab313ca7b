#include "retrysim/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace retrysim {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

namespace {

constexpr double kZ95 = 1.959963985;

struct PooledCounters {
  double frozen_frames = 0, total_frames = 0;
  double packets = 0, drops = 0, attempts = 0;
  double m1 = 0, prio1_drops = 0;
  double idr_frames = 0, idr_packets = 0, p_frames = 0, p_packets = 0;
  double interval_frames = 0, intervals = 0;
};

MethodAggregate aggregate_method(const std::vector<const RunMetrics*>& runs) {
  MethodAggregate agg;
  if (runs.empty()) return agg;
  std::vector<double> fractions, frames, attempts, packets, drops, measured, m1, m2, m3;
  PooledCounters pool;
  for (const RunMetrics* m : runs) {
    fractions.push_back(m->frozen.fraction);
    frames.push_back(static_cast<double>(m->frozen.frozen));
    attempts.push_back(static_cast<double>(m->attempts_total));
    packets.push_back(static_cast<double>(m->packets_sent));
    drops.push_back(static_cast<double>(m->drops_total));
    measured.push_back(m->measured_p);
    m1.push_back(static_cast<double>(m->m1));
    m2.push_back(static_cast<double>(m->m2));
    m3.push_back(static_cast<double>(m->m3));
    pool.packets += static_cast<double>(m->packets_sent);
    pool.drops += static_cast<double>(m->drops_total);
    pool.m1 += static_cast<double>(m->m1);
    pool.prio1_drops += static_cast<double>(m->priority1_drops);
    pool.idr_packets += m->measured_idr_packets * static_cast<double>(m->idr_frames_generated);
    pool.idr_frames += static_cast<double>(m->idr_frames_generated);
    const double p_frames = static_cast<double>(m->frozen.total - m->idr_frames_generated);
    pool.p_packets += m->measured_p_packets * p_frames;
    pool.p_frames += p_frames;
    pool.interval_frames += m->measured_interval * static_cast<double>(m->completed_intervals);
    pool.intervals += static_cast<double>(m->completed_intervals);
  }
  agg.frozen_frames_mean = mean_of(frames);
  agg.frozen_fraction_mean = mean_of(fractions);
  agg.frozen_fraction_sd = sample_sd(fractions);
  agg.attempts_mean = mean_of(attempts);
  agg.packets_mean = mean_of(packets);
  agg.drops_mean = mean_of(drops);
  agg.measured_p_mean = mean_of(measured);
  agg.m1_mean = mean_of(m1);
  agg.m2_mean = mean_of(m2);
  agg.m3_mean = mean_of(m3);
  agg.p0_hat_pooled = pool.packets > 0 ? pool.drops / pool.packets : 0.0;
  agg.p1_hat_pooled = pool.m1 > 0 ? pool.prio1_drops / pool.m1 : 0.0;
  agg.idr_packets_pooled = pool.idr_frames > 0 ? pool.idr_packets / pool.idr_frames : 0.0;
  agg.p_packets_pooled = pool.p_frames > 0 ? pool.p_packets / pool.p_frames : 0.0;
  agg.interval_pooled = pool.intervals > 0 ? pool.interval_frames / pool.intervals : 0.0;
  return agg;
}

double seed_cond10_margin(const RunConfig& base, const RunMetrics& m) {
  const double dp = m.measured_p_packets > 0
                        ? m.measured_p_packets
                        : static_cast<double>(packetize(base.video.p_bytes,
                                                        base.video.mtu_payload).size());
  return sufficient_condition_margin(m.measured_p, base.policy,
                                     base.nominal_interval_frames(), dp);
}

// Frozen-frame bound from one seed's paired measurements; falls back to the
// trivial N_f bound when the preconditions do not hold.
double seed_bound(const SeedRow& row) {
  const double nf = static_cast<double>(row.baseline.frozen.frozen);
  const double p0 = row.baseline.p0_hat;
  const double p1 = row.proposed.p1_hat;
  if (p0 <= 0.0 || p1 > p0) return nf;
  const double d = row.baseline.measured_idr_packets;
  const double dp = row.baseline.measured_p_packets;
  const double big_d = row.baseline.measured_interval;
  if (d <= 0 || dp <= 0 || big_d < 1) return nf;
  return frozen_bound(nf, p0, p1, d, dp, big_d);
}

}  // namespace

ComparisonReport compare(const RunConfig& base, const std::vector<std::uint64_t>& seeds) {
  ComparisonReport report;
  report.base = base;
  report.scenario = base.scenario_label();

  for (std::uint64_t seed : seeds) {
    RunConfig cfg = base;
    cfg.seed = seed;
    try {
      SeedRow row;
      row.seed = seed;
      cfg.method = Method::baseline;
      row.baseline = run_session(cfg);
      cfg.method = Method::proposed;
      row.proposed = run_session(cfg);
      report.rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      report.failures.emplace_back(seed, e.what());
    }
  }

  std::vector<const RunMetrics*> base_runs, prop_runs;
  std::vector<double> diffs;
  for (const SeedRow& row : report.rows) {
    base_runs.push_back(&row.baseline);
    prop_runs.push_back(&row.proposed);
    diffs.push_back(row.baseline.frozen.fraction - row.proposed.frozen.fraction);
  }
  report.baseline = aggregate_method(base_runs);
  report.proposed = aggregate_method(prop_runs);
  report.diff_mean = mean_of(diffs);
  report.diff_sd = sample_sd(diffs);
  report.diff_ci95 =
      diffs.size() > 1 ? kZ95 * report.diff_sd / std::sqrt(static_cast<double>(diffs.size())) : 0.0;
  report.reduction = report.baseline.frozen_fraction_mean > 0
                         ? 1.0 - report.proposed.frozen_fraction_mean /
                                     report.baseline.frozen_fraction_mean
                         : 0.0;
  report.attempts_ratio = report.baseline.attempts_mean > 0
                              ? report.proposed.attempts_mean / report.baseline.attempts_mean
                              : 0.0;
  report.packets_ratio = report.baseline.packets_mean > 0
                             ? report.proposed.packets_mean / report.baseline.packets_mean
                             : 0.0;

  // Bound from pooled measurements; D, d, d' come from the baseline runs,
  // the priority-1 loss rate from the proposed runs.
  const double nf = report.baseline.frozen_frames_mean;
  const double p0 = report.baseline.p0_hat_pooled;
  const double p1 = report.proposed.p1_hat_pooled;
  const double d = report.baseline.idr_packets_pooled;
  const double dp = report.baseline.p_packets_pooled;
  const double big_d = report.baseline.interval_pooled > 0
                           ? report.baseline.interval_pooled
                           : base.nominal_interval_frames();
  report.bound_applicable = p0 > 0 && p1 <= p0 && d > 0 && dp > 0 && big_d >= 1;
  report.bound_frames =
      report.bound_applicable ? frozen_bound(nf, p0, p1, d, dp, big_d) : nf;
  const double margin_dp = dp > 0
      ? dp
      : static_cast<double>(packetize(base.video.p_bytes, base.video.mtu_payload).size());
  report.cond10_margin = sufficient_condition_margin(
      report.proposed.measured_p_mean, base.policy, big_d, margin_dp);

  if (base.mode == ChannelMode::dcf && !report.rows.empty()) {
    const size_t n_stations = report.rows.front().baseline.stations.size();
    for (size_t s = 0; s < n_stations; ++s) {
      std::vector<double> b_bps, p_bps;
      for (const SeedRow& row : report.rows) {
        b_bps.push_back(row.baseline.stations[s].throughput_bps);
        p_bps.push_back(row.proposed.stations[s].throughput_bps);
      }
      StationCompare sc;
      sc.station = static_cast<int>(s);
      sc.role = base.dcf.stations[s].role;
      sc.baseline_bps = mean_of(b_bps);
      sc.proposed_bps = mean_of(p_bps);
      sc.rel_diff = sc.baseline_bps > 0
                        ? (sc.proposed_bps - sc.baseline_bps) / sc.baseline_bps
                        : 0.0;
      report.stations.push_back(sc);
    }
  }
  return report;
}

std::vector<ComparisonReport> sweep(const RunConfig& base, const SweepGrid& grid,
                                    const std::vector<std::uint64_t>& seeds) {
  std::vector<ComparisonReport> reports;
  if (grid.empty()) return reports;
  for (const RunConfig& cfg : expand_grid(base, grid)) {
    reports.push_back(compare(cfg, seeds));
  }
  return reports;
}

namespace {

void write_row(std::ostream& out, const std::string& scenario, const std::string& seed,
               const std::string& method, double frozen_frames, double total_frames,
               double fraction, double m1, double m2, double m3, double attempts,
               double drops, double measured_p, double p0_hat, double bound,
               double margin) {
  out << scenario << ',' << seed << ',' << method << ',' << format_g(frozen_frames)
      << ',' << format_g(total_frames) << ',' << format_g(fraction) << ','
      << format_g(m1) << ',' << format_g(m2) << ',' << format_g(m3) << ','
      << format_g(attempts) << ',' << format_g(drops) << ',' << format_g(measured_p)
      << ',' << format_g(p0_hat) << ',' << format_g(bound) << ',' << format_g(margin)
      << '\n';
}

}  // namespace

void write_compare_csv(const ComparisonReport& report, std::ostream& out) {
  out << "scenario,seed,method,frozen_frames,total_frames,frozen_fraction,"
         "m1,m2,m3,attempts,drops,measured_p,p0_hat,bound,cond10_margin\n";
  for (const SeedRow& row : report.rows) {
    const double bound = seed_bound(row);
    for (const auto* pair : {&row.baseline, &row.proposed}) {
      const RunMetrics& m = *pair;
      write_row(out, report.scenario, std::to_string(row.seed),
                pair == &row.baseline ? "baseline" : "proposed",
                static_cast<double>(m.frozen.frozen), static_cast<double>(m.frozen.total),
                m.frozen.fraction, static_cast<double>(m.m1), static_cast<double>(m.m2),
                static_cast<double>(m.m3), static_cast<double>(m.attempts_total),
                static_cast<double>(m.drops_total), m.measured_p, m.p0_hat, bound,
                seed_cond10_margin(report.base, m));
    }
  }
  const double total_frames = static_cast<double>(report.base.video.n_frames);
  write_row(out, report.scenario, "agg", "baseline", report.baseline.frozen_frames_mean,
            total_frames, report.baseline.frozen_fraction_mean, report.baseline.m1_mean,
            report.baseline.m2_mean, report.baseline.m3_mean, report.baseline.attempts_mean,
            report.baseline.drops_mean, report.baseline.measured_p_mean,
            report.baseline.p0_hat_pooled, report.bound_frames, report.cond10_margin);
  write_row(out, report.scenario, "agg", "proposed", report.proposed.frozen_frames_mean,
            total_frames, report.proposed.frozen_fraction_mean, report.proposed.m1_mean,
            report.proposed.m2_mean, report.proposed.m3_mean, report.proposed.attempts_mean,
            report.proposed.drops_mean, report.proposed.measured_p_mean,
            report.proposed.p0_hat_pooled, report.bound_frames, report.cond10_margin);
}

std::string compare_csv(const ComparisonReport& report) {
  std::ostringstream out;
  write_compare_csv(report, out);
  return out.str();
}

void write_throughput_csv(const ComparisonReport& report, std::ostream& out) {
  out << "station,role,method,delivered_bytes,throughput_Bps,attempts,collisions\n";
  auto role_name = [](StationRole r) {
    switch (r) {
      case StationRole::video_sender: return "video_sender";
      case StationRole::saturated_cross: return "saturated_cross";
      case StationRole::poisson_cross: return "poisson_cross";
    }
    return "unknown";
  };
  // Per-seed means; per-seed rows would repeat what compare.csv carries.
  for (const StationCompare& sc : report.stations) {
    std::vector<double> fields[2][4];
    for (const SeedRow& row : report.rows) {
      const StationThroughput& b = row.baseline.stations[static_cast<size_t>(sc.station)];
      const StationThroughput& p = row.proposed.stations[static_cast<size_t>(sc.station)];
      fields[0][0].push_back(static_cast<double>(b.delivered_bytes));
      fields[0][1].push_back(b.throughput_bps);
      fields[0][2].push_back(static_cast<double>(b.attempts));
      fields[0][3].push_back(static_cast<double>(b.collisions));
      fields[1][0].push_back(static_cast<double>(p.delivered_bytes));
      fields[1][1].push_back(p.throughput_bps);
      fields[1][2].push_back(static_cast<double>(p.attempts));
      fields[1][3].push_back(static_cast<double>(p.collisions));
    }
    for (int method = 0; method < 2; ++method) {
      out << sc.station << ',' << role_name(sc.role) << ','
          << (method == 0 ? "baseline" : "proposed");
      for (int f = 0; f < 4; ++f) out << ',' << format_g(mean_of(fields[method][f]));
      out << '\n';
    }
  }
}

std::string throughput_csv(const ComparisonReport& report) {
  std::ostringstream out;
  write_throughput_csv(report, out);
  return out.str();
}

std::string report_to_json(const ComparisonReport& report) {
  using json = nlohmann::ordered_json;
  json j;
  j["scenario"] = report.scenario;
  j["seeds"] = report.rows.size();
  auto method_json = [](const MethodAggregate& a) {
    json m;
    m["frozen_frames_mean"] = a.frozen_frames_mean;
    m["frozen_fraction_mean"] = a.frozen_fraction_mean;
    m["frozen_fraction_sd"] = a.frozen_fraction_sd;
    m["attempts_mean"] = a.attempts_mean;
    m["packets_mean"] = a.packets_mean;
    m["drops_mean"] = a.drops_mean;
    m["measured_p_mean"] = a.measured_p_mean;
    m["p0_hat"] = a.p0_hat_pooled;
    m["p1_hat"] = a.p1_hat_pooled;
    m["d_hat"] = a.idr_packets_pooled;
    m["dprime_hat"] = a.p_packets_pooled;
    m["interval_hat"] = a.interval_pooled;
    return m;
  };
  j["baseline"] = method_json(report.baseline);
  j["proposed"] = method_json(report.proposed);
  j["diff_mean"] = report.diff_mean;
  j["diff_sd"] = report.diff_sd;
  j["diff_ci95"] = report.diff_ci95;
  j["reduction"] = report.reduction;
  j["attempts_ratio"] = report.attempts_ratio;
  j["packets_ratio"] = report.packets_ratio;
  j["bound_frames"] = report.bound_frames;
  j["bound_applicable"] = report.bound_applicable;
  j["cond10_margin"] = report.cond10_margin;
  if (!report.stations.empty()) {
    json stations = json::array();
    for (const StationCompare& sc : report.stations) {
      json s;
      s["station"] = sc.station;
      s["baseline_Bps"] = sc.baseline_bps;
      s["proposed_Bps"] = sc.proposed_bps;
      s["rel_diff"] = sc.rel_diff;
      stations.push_back(s);
    }
    j["stations"] = stations;
  }
  if (!report.rows.empty() && report.base.mode == ChannelMode::dcf) {
    // Delay percentiles are informational: reported per method, not gated.
    json delay;
    auto percentiles = [&](auto pick) {
      std::vector<double> b, p;
      for (const SeedRow& row : report.rows) {
        b.push_back(pick(row.baseline.video_delay));
        p.push_back(pick(row.proposed.video_delay));
      }
      return json{{"baseline", mean_of(b)}, {"proposed", mean_of(p)}};
    };
    delay["p50"] = percentiles([](const DelaySummary& d) { return d.p50; });
    delay["p90"] = percentiles([](const DelaySummary& d) { return d.p90; });
    delay["p99"] = percentiles([](const DelaySummary& d) { return d.p99; });
    j["video_delay_seconds"] = delay;
  }
  if (!report.failures.empty()) {
    json f = json::array();
    for (const auto& [seed, what] : report.failures) {
      f.push_back({{"seed", seed}, {"error", what}});
    }
    j["failures"] = f;
  }
  return j.dump(2) + "\n";
}

std::string run_metrics_json(const RunConfig& config, const RunMetrics& m) {
  using json = nlohmann::ordered_json;
  json j;
  j["scenario"] = config.scenario_label();
  j["seed"] = config.seed;
  j["method"] = config.method == Method::baseline ? "baseline" : "proposed";
  j["frozen_frames"] = m.frozen.frozen;
  j["total_frames"] = m.frozen.total;
  j["frozen_fraction"] = m.frozen.fraction;
  j["intervals"] = m.frozen.intervals;
  j["m1"] = m.m1;
  j["m2"] = m.m2;
  j["m3"] = m.m3;
  j["packets_sent"] = m.packets_sent;
  j["attempts"] = m.attempts_total;
  j["drops"] = m.drops_total;
  j["measured_p"] = m.measured_p;
  j["p0_hat"] = m.p0_hat;
  j["p1_hat"] = m.p1_hat;
  j["idr_frames"] = m.idr_frames_generated;
  j["feedback_events"] = m.feedback_events;
  j["feedback_accepted"] = m.feedback_accepted;
  if (!m.stations.empty()) {
    json st = json::array();
    for (const StationThroughput& s : m.stations) {
      st.push_back({{"station", s.station},
                    {"throughput_Bps", s.throughput_bps},
                    {"attempts", s.attempts},
                    {"collisions", s.collisions}});
    }
    j["stations"] = st;
    j["video_delay_p50"] = m.video_delay.p50;
    j["video_delay_p99"] = m.video_delay.p99;
  }
  return j.dump(2) + "\n";
}

std::string report_summary(const ComparisonReport& report) {
  std::ostringstream out;
  out << "scenario " << report.scenario << " (" << report.rows.size() << " paired seeds";
  if (!report.failures.empty()) out << ", " << report.failures.size() << " failed";
  out << ")\n";
  out << "  frozen fraction: baseline " << format_g(report.baseline.frozen_fraction_mean)
      << "  proposed " << format_g(report.proposed.frozen_fraction_mean) << "  reduction "
      << format_g(report.reduction * 100.0) << "%\n";
  out << "  paired diff " << format_g(report.diff_mean) << " +- " << format_g(report.diff_ci95)
      << " (95%)\n";
  out << "  attempts ratio " << format_g(report.attempts_ratio) << ", packets ratio "
      << format_g(report.packets_ratio) << "\n";
  out << "  bound " << format_g(report.bound_frames) << " frames (proposed mean "
      << format_g(report.proposed.frozen_frames_mean) << "), cond10 margin "
      << format_g(report.cond10_margin) << "\n";
  for (const StationCompare& sc : report.stations) {
    out << "  station " << sc.station << " throughput diff "
        << format_g(sc.rel_diff * 100.0) << "%\n";
  }
  return out.str();
}

std::vector<GateOutcome> evaluate_gates(const ComparisonReport& report) {
  std::vector<GateOutcome> gates;
  if (report.baseline.frozen_frames_mean > 0) {
    GateOutcome g;
    g.name = "frozen_fraction_improves_95";
    g.pass = report.diff_mean - report.diff_ci95 > 0.0;
    g.detail = "diff " + format_g(report.diff_mean) + " +- " + format_g(report.diff_ci95);
    gates.push_back(g);
  }
  {
    GateOutcome g;
    g.name = "attempts_neutral";
    g.pass = report.attempts_ratio <= 1.01;
    g.detail = "ratio " + format_g(report.attempts_ratio) + " <= 1.01";
    gates.push_back(g);
  }
  if (report.bound_applicable && report.cond10_margin > 0) {
    GateOutcome g;
    g.name = "bound_dominates";
    g.pass = report.proposed.frozen_frames_mean < report.bound_frames;
    g.detail = format_g(report.proposed.frozen_frames_mean) + " < " +
               format_g(report.bound_frames);
    gates.push_back(g);
  }
  for (const StationCompare& sc : report.stations) {
    if (sc.role == StationRole::video_sender) continue;
    GateOutcome g;
    g.name = "throughput_neutral_station_" + std::to_string(sc.station);
    g.pass = std::fabs(sc.rel_diff) < 0.02;
    g.detail = "rel diff " + format_g(sc.rel_diff);
    gates.push_back(g);
  }
  if (report.base.mode == ChannelMode::dcf) {
    GateOutcome g;
    g.name = "collision_ordering";
    g.pass = report.proposed.measured_p_mean <= report.baseline.measured_p_mean + 0.01;
    g.detail = format_g(report.proposed.measured_p_mean) + " <= " +
               format_g(report.baseline.measured_p_mean) + " + 0.01";
    gates.push_back(g);
  }
  return gates;
}

AnalyticReportResult build_analytic_report(const AnalyticReportInput& input) {
  input.params.validate();
  input.video.validate();
  AnalyticReportResult r;
  r.input = input;
  const RetryPolicy& pol = input.params.policy;
  r.p0 = input.params.p0();
  r.p1 = input.params.p1();
  r.p2 = input.params.p2();
  r.p3 = input.params.p3();
  r.attempts_base = expected_attempts(input.params.p_tilde, pol.r_base);
  r.attempts_r1 = expected_attempts(input.params.p, pol.r1);
  r.attempts_r3 = expected_attempts(input.params.p, pol.r3);
  r.packets_baseline = expected_packets_baseline(input.n_frames, input.video, r.p0);
  r.frozen_baseline =
      expected_frozen_baseline(r.p0, r.packets_baseline, input.video.interval_frames);
  r.packets_proposed = expected_packets_proposed(input.n_frames, input.video, r.p1);
  r.stationary = stationary_closed_form(input.video, r.p1);
  const auto pi = stationary_numeric(markov_transition_matrix(input.video, r.p1));
  const MarkovLayout ls(input.video);
  double err = 0.0;
  for (int i = 0; i < ls.d; ++i) {
    err = std::max(err, std::fabs(pi[static_cast<size_t>(ls.idr(i))] - r.stationary.q_idr_state));
  }
  for (int j = 0; j < ls.dp; ++j) {
    err = std::max(err, std::fabs(pi[static_cast<size_t>(ls.pframe(j))] - r.stationary.q_p_state));
  }
  for (int k = 0; k < ls.low_states(); ++k) {
    err = std::max(err, std::fabs(pi[static_cast<size_t>(ls.low(k))] - r.stationary.q_low_state));
  }
  r.stationary_numeric_max_err = err;
  // In steady state no frames take the fixed-limit class, so n2 = 0 and n1
  // covers the IDR and clean-run packets.
  r.n1 = (r.stationary.q_idr_total + input.video.p_packets * r.stationary.q_p_state) *
         r.packets_proposed;
  r.frozen_proposed =
      expected_frozen_proposed(r.p1, r.n1, r.p2, 0.0, input.video.interval_frames);
  const auto counts = frozen_interval_packet_counts(r.frozen_proposed, input.video);
  r.n3 = counts.low_priority;
  r.n_idr = counts.idr;
  r.bound = frozen_bound(r.frozen_baseline, r.p0, r.p1, input.video);
  r.cond10_margin = sufficient_condition_margin(input.params.p, pol, input.video);
  return r;
}

std::string render_analytic_report(const AnalyticReportResult& r) {
  std::ostringstream out;
  const RetryPolicy& pol = r.input.params.policy;
  out << "channel: p=" << format_g(r.input.params.p)
      << " p_tilde=" << format_g(r.input.params.p_tilde) << "  policy R1/R2/R3="
      << pol.r1 << "/" << pol.r2 << "/" << pol.r3 << " (base " << pol.r_base << ")\n";
  out << "video: d=" << r.input.video.idr_packets << " d'=" << r.input.video.p_packets
      << " D=" << r.input.video.interval_frames << " frames=" << format_g(r.input.n_frames)
      << "\n";
  out << "loss rates: p0=" << format_g(r.p0) << " p1=" << format_g(r.p1)
      << " p2=" << format_g(r.p2) << " p3=" << format_g(r.p3) << "\n";
  out << "mean attempts/packet: base=" << format_g(r.attempts_base)
      << " R1=" << format_g(r.attempts_r1) << " R3=" << format_g(r.attempts_r3) << "\n";
  out << "expected packets: baseline=" << format_g(r.packets_baseline)
      << " proposed=" << format_g(r.packets_proposed) << "\n";
  out << "priority packet split: n1=" << format_g(r.n1) << " n3=" << format_g(r.n3)
      << " idr=" << format_g(r.n_idr) << "\n";
  out << "expected frozen frames: baseline=" << format_g(r.frozen_baseline)
      << " proposed=" << format_g(r.frozen_proposed) << " bound=" << format_g(r.bound)
      << "\n";
  out << "cond10 margin (sufficient condition): " << format_g(r.cond10_margin)
      << (r.cond10_margin > 0 ? " (holds)" : " (fails)") << "\n";
  out << "stationary: q_I=" << format_g(r.stationary.q_idr_total)
      << " q_I1=" << format_g(r.stationary.q_idr_state)
      << " q_N1=" << format_g(r.stationary.q_p_state)
      << " q_31=" << format_g(r.stationary.q_low_state)
      << " Pa=" << format_g(r.stationary.frame_ok_idr)
      << " Pb=" << format_g(r.stationary.frame_ok_p) << "\n";
  out << "stationary closed-form vs numeric max err: "
      << format_g(r.stationary_numeric_max_err) << "\n";
  return out.str();
}

std::string analytic_report_json(const AnalyticReportResult& r) {
  using json = nlohmann::ordered_json;
  json j;
  j["p"] = r.input.params.p;
  j["p_tilde"] = r.input.params.p_tilde;
  j["p0"] = r.p0;
  j["p1"] = r.p1;
  j["p2"] = r.p2;
  j["p3"] = r.p3;
  j["attempts_base"] = r.attempts_base;
  j["attempts_r1"] = r.attempts_r1;
  j["attempts_r3"] = r.attempts_r3;
  j["packets_baseline"] = r.packets_baseline;
  j["packets_proposed"] = r.packets_proposed;
  j["n1"] = r.n1;
  j["n3"] = r.n3;
  j["n_idr"] = r.n_idr;
  j["frozen_baseline"] = r.frozen_baseline;
  j["frozen_proposed"] = r.frozen_proposed;
  j["bound"] = r.bound;
  j["cond10_margin"] = r.cond10_margin;
  j["q_I"] = r.stationary.q_idr_total;
  j["q_I1"] = r.stationary.q_idr_state;
  j["q_N1"] = r.stationary.q_p_state;
  j["q_31"] = r.stationary.q_low_state;
  j["Pa"] = r.stationary.frame_ok_idr;
  j["Pb"] = r.stationary.frame_ok_p;
  j["stationary_max_err"] = r.stationary_numeric_max_err;
  return j.dump(2) + "\n";
}

}  // namespace retrysim
