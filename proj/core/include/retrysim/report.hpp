#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "retrysim/config.hpp"
#include "retrysim/session.hpp"

namespace retrysim {

struct SeedRow {
  std::uint64_t seed = 0;
  RunMetrics baseline;
  RunMetrics proposed;
};

struct MethodAggregate {
  double frozen_frames_mean = 0;
  double frozen_fraction_mean = 0;
  double frozen_fraction_sd = 0;
  double attempts_mean = 0;
  double packets_mean = 0;
  double drops_mean = 0;
  double measured_p_mean = 0;
  double p0_hat_pooled = 0;       // total drops / total packets
  double p1_hat_pooled = 0;       // total priority-1 drops / total m1
  double idr_packets_pooled = 0;  // mean packets per IDR frame
  double p_packets_pooled = 0;    // mean packets per P frame
  double interval_pooled = 0;     // mean completed frozen-run length
  double m1_mean = 0, m2_mean = 0, m3_mean = 0;
};

struct StationCompare {
  int station = 0;
  StationRole role = StationRole::saturated_cross;
  double baseline_bps = 0;
  double proposed_bps = 0;
  double rel_diff = 0;  // (proposed - baseline) / baseline
};

// Paired baseline-vs-proposed comparison over a seed list.
struct ComparisonReport {
  std::string scenario;
  RunConfig base;  // method field is irrelevant here
  std::vector<SeedRow> rows;
  std::vector<std::pair<std::uint64_t, std::string>> failures;

  MethodAggregate baseline;
  MethodAggregate proposed;

  // Paired statistics on the frozen fraction (baseline - proposed).
  double diff_mean = 0;
  double diff_sd = 0;
  double diff_ci95 = 0;  // half-width of the 95% interval on the mean
  double reduction = 0;  // 1 - proposed_mean / baseline_mean
  double attempts_ratio = 0;
  double packets_ratio = 0;

  // Analytic bound evaluated from pooled measured parameters.
  double bound_frames = 0;
  bool bound_applicable = false;
  double cond10_margin = 0;

  std::vector<StationCompare> stations;  // dcf mode
};

/// Run both methods for every seed (paired) and aggregate. Per-seed
/// failures are recorded and skipped, the rest of the seeds continue.
ComparisonReport compare(const RunConfig& base, const std::vector<std::uint64_t>& seeds);

/// One comparison per grid point.
std::vector<ComparisonReport> sweep(const RunConfig& base, const SweepGrid& grid,
                                    const std::vector<std::uint64_t>& seeds);

/// Per-seed and aggregate rows:
/// scenario,seed,method,frozen_frames,total_frames,frozen_fraction,
/// m1,m2,m3,attempts,drops,measured_p,p0_hat,bound,cond10_margin
void write_compare_csv(const ComparisonReport& report, std::ostream& out);
std::string compare_csv(const ComparisonReport& report);

/// station,role,method,delivered_bytes,throughput_Bps,attempts,collisions
void write_throughput_csv(const ComparisonReport& report, std::ostream& out);
std::string throughput_csv(const ComparisonReport& report);

std::string report_to_json(const ComparisonReport& report);
std::string report_summary(const ComparisonReport& report);
std::string run_metrics_json(const RunConfig& config, const RunMetrics& metrics);

struct GateOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// The statistical acceptance gates on one comparison: frozen-fraction
/// improvement at 95% confidence, attempt-count neutrality, bound
/// dominance when condition (10) holds, and (dcf) cross-station
/// throughput neutrality plus collision-probability ordering.
std::vector<GateOutcome> evaluate_gates(const ComparisonReport& report);

// Closed-form side of the toolkit as one table.
struct AnalyticReportInput {
  AnalyticParams params;
  VideoModelParams video;
  double n_frames = 295;
};

struct AnalyticReportResult {
  AnalyticReportInput input;
  double p0 = 0, p1 = 0, p2 = 0, p3 = 0;
  double attempts_base = 0, attempts_r1 = 0, attempts_r3 = 0;
  double packets_baseline = 0;
  double frozen_baseline = 0;
  double packets_proposed = 0;
  double n1 = 0, n3 = 0, n_idr = 0;
  double frozen_proposed = 0;
  double bound = 0;
  double cond10_margin = 0;
  StationaryDist stationary;
  double stationary_numeric_max_err = 0;
};

AnalyticReportResult build_analytic_report(const AnalyticReportInput& input);
std::string render_analytic_report(const AnalyticReportResult& r);
std::string analytic_report_json(const AnalyticReportResult& r);

// Shared helpers.
double mean_of(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);
std::string format_g(double v);  // "%.9g", the CSV number format

}  // namespace retrysim
