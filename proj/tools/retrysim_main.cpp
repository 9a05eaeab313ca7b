// Command-line front end: analytic tables, single simulation runs, paired
// baseline-vs-proposed comparisons, and parameter sweeps with CSV/JSON
// reports. Exit codes: 0 ok, 1 configuration error, 2 gate failure under
// --gate.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "retrysim/report.hpp"

namespace {

using namespace retrysim;

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  if (spec.find(',') == std::string::npos) {
    const auto n = std::stoull(spec);
    if (n == 0) throw std::invalid_argument("--seeds: need at least one seed");
    for (std::uint64_t s = 1; s <= n; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw std::invalid_argument("--seeds: empty list");
  return seeds;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

struct CommonOpts {
  std::string config_path;
  std::string seeds_spec = "100";
  std::string out_dir;
  std::string format = "csv";
  std::string mode_override;
  bool gate = false;
};

RunConfig load_base_config(const CommonOpts& opts) {
  RunConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = load_run_config(opts.config_path);
  }
  if (opts.mode_override == "abstract") cfg.mode = ChannelMode::abstract_channel;
  if (opts.mode_override == "dcf") cfg.mode = ChannelMode::dcf;
  cfg.validate();
  return cfg;
}

int emit_report(const ComparisonReport& report, const CommonOpts& opts,
                const std::string& stem) {
  std::cout << report_summary(report);
  if (report.rows.empty() && !report.failures.empty()) {
    std::cerr << "config error: every seed failed; first error: "
              << report.failures.front().second << "\n";
    return 1;
  }
  if (!opts.out_dir.empty()) {
    const std::filesystem::path dir(opts.out_dir);
    if (opts.format == "json") {
      write_file(dir / (stem + ".json"), report_to_json(report));
    } else {
      write_file(dir / (stem + ".csv"), compare_csv(report));
      if (!report.stations.empty()) {
        write_file(dir / (stem + "_throughput.csv"), throughput_csv(report));
      }
    }
  }
  if (!opts.gate) return 0;
  bool ok = true;
  for (const GateOutcome& g : evaluate_gates(report)) {
    std::cout << "  gate " << g.name << ": " << (g.pass ? "pass" : "FAIL") << " ("
              << g.detail << ")\n";
    ok = ok && g.pass;
  }
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"retry-limit scheduling simulator for video over a contended WLAN"};
  app.require_subcommand(1);

  CommonOpts opts;

  // analytic
  auto* analytic = app.add_subcommand("analytic", "closed-form model report");
  AnalyticReportInput ain;
  ain.params.p = 0.45;
  ain.params.p_tilde = 0.45;
  std::string an_format = "text";
  std::string an_config;
  analytic->add_option("--config", an_config, "derive parameters from a run config");
  analytic->add_option("--p", ain.params.p, "collision probability, proposed scenario");
  analytic->add_option("--p-tilde", ain.params.p_tilde, "collision probability, baseline scenario");
  analytic->add_option("--r1", ain.params.policy.r1, "priority-1 retry limit");
  analytic->add_option("--r2", ain.params.policy.r2, "priority-2 retry limit");
  analytic->add_option("--r3", ain.params.policy.r3, "priority-3 retry limit");
  analytic->add_option("--r-base", ain.params.policy.r_base, "baseline retry limit");
  analytic->add_option("--idr-packets", ain.video.idr_packets, "packets per IDR frame (d)");
  analytic->add_option("--p-packets", ain.video.p_packets, "packets per P frame (d')");
  analytic->add_option("--interval-frames", ain.video.interval_frames, "frames per frozen interval (D)");
  analytic->add_option("--frames", ain.n_frames, "video length in frames");
  analytic->add_option("--format", an_format, "text|json");
  analytic->add_option("--out", opts.out_dir, "output directory");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "single seeded closed-loop run");
  std::uint64_t sim_seed = 0;
  std::string sim_method;
  std::string sim_format = "text";
  simulate->add_option("--config", opts.config_path, "run config (JSON)");
  simulate->add_option("--seed", sim_seed, "override the config seed");
  simulate->add_option("--method", sim_method, "baseline|proposed");
  simulate->add_option("--mode", opts.mode_override, "abstract|dcf");
  simulate->add_option("--format", sim_format, "text|json");
  simulate->add_option("--out", opts.out_dir, "output directory");

  // compare
  auto* cmp = app.add_subcommand("compare", "paired baseline-vs-proposed comparison");
  cmp->add_option("--config", opts.config_path, "run config (JSON)");
  cmp->add_option("--seeds", opts.seeds_spec, "seed count or comma-separated list");
  cmp->add_option("--out", opts.out_dir, "output directory");
  cmp->add_option("--format", opts.format, "csv|json");
  cmp->add_option("--mode", opts.mode_override, "abstract|dcf");
  cmp->add_flag("--gate", opts.gate, "exit 2 when a statistical gate fails");

  // sweep
  auto* sw = app.add_subcommand("sweep", "comparison per grid point");
  sw->add_option("--config", opts.config_path, "run config with a 'grid' object")->required();
  sw->add_option("--seeds", opts.seeds_spec, "seed count or comma-separated list");
  sw->add_option("--out", opts.out_dir, "output directory");
  sw->add_option("--format", opts.format, "csv|json");
  sw->add_option("--mode", opts.mode_override, "abstract|dcf");
  sw->add_flag("--gate", opts.gate, "exit 2 when a statistical gate fails");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analytic->parsed()) {
      if (!an_config.empty()) {
        const RunConfig cfg = load_run_config(an_config);
        ain.params.p = cfg.channel_p;
        ain.params.p_tilde = cfg.channel_p;
        ain.params.policy = cfg.policy;
        ain.video.idr_packets = static_cast<int>(
            packetize(cfg.video.idr_bytes, cfg.video.mtu_payload).size());
        ain.video.p_packets = static_cast<int>(
            packetize(cfg.video.p_bytes, cfg.video.mtu_payload).size());
        ain.video.interval_frames = cfg.nominal_interval_frames();
        ain.n_frames = static_cast<double>(cfg.video.n_frames);
      }
      const AnalyticReportResult r = build_analytic_report(ain);
      const std::string text =
          an_format == "json" ? analytic_report_json(r) : render_analytic_report(r);
      std::cout << text;
      if (!opts.out_dir.empty()) {
        write_file(std::filesystem::path(opts.out_dir) /
                       (an_format == "json" ? "analytic.json" : "analytic.txt"),
                   text);
      }
      return 0;
    }

    if (simulate->parsed()) {
      RunConfig cfg = load_base_config(opts);
      if (sim_seed != 0) cfg.seed = sim_seed;
      if (sim_method == "baseline") cfg.method = Method::baseline;
      if (sim_method == "proposed") cfg.method = Method::proposed;
      const RunMetrics m = run_session(cfg);
      if (sim_format == "json") {
        const std::string text = run_metrics_json(cfg, m);
        std::cout << text;
        if (!opts.out_dir.empty()) {
          write_file(std::filesystem::path(opts.out_dir) / "simulate.json", text);
        }
        return 0;
      }
      std::cout << "scenario " << cfg.scenario_label() << " seed " << cfg.seed << " method "
                << (cfg.method == Method::baseline ? "baseline" : "proposed") << "\n"
                << "  frozen " << m.frozen.frozen << "/" << m.frozen.total << " ("
                << format_g(m.frozen.fraction) << ")\n"
                << "  packets " << m.packets_sent << " (m1 " << m.m1 << ", m2 " << m.m2
                << ", m3 " << m.m3 << ")\n"
                << "  attempts " << m.attempts_total << " drops " << m.drops_total
                << " measured_p " << format_g(m.measured_p) << "\n"
                << "  idr frames " << m.idr_frames_generated << " feedback accepted "
                << m.feedback_accepted << "\n";
      for (const StationThroughput& st : m.stations) {
        std::cout << "  station " << st.station << " throughput "
                  << format_g(st.throughput_bps) << " B/s\n";
      }
      return 0;
    }

    const std::vector<std::uint64_t> seeds = parse_seeds(opts.seeds_spec);
    if (cmp->parsed()) {
      const RunConfig base = load_base_config(opts);
      return emit_report(compare(base, seeds), opts, "compare");
    }

    // sweep
    const std::string text = read_file(opts.config_path);
    RunConfig base = parse_run_config(text);
    if (opts.mode_override == "abstract") base.mode = ChannelMode::abstract_channel;
    if (opts.mode_override == "dcf") base.mode = ChannelMode::dcf;
    const SweepGrid grid = parse_sweep_grid(text);
    if (grid.empty()) {
      std::cout << "empty grid, nothing to sweep\n";
      return 0;
    }
    int worst = 0;
    int point = 0;
    for (const ComparisonReport& report : sweep(base, grid, seeds)) {
      const int rc = emit_report(report, opts, "sweep_" + std::to_string(point++));
      if (rc == 1) return 1;
      worst = std::max(worst, rc);
    }
    return worst;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
