#include "retrysim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace retrysim {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

RetryPolicy parse_policy(const json& j) {
  RetryPolicy p;
  p.r1 = j.at("r1").get<int>();
  p.r2 = j.at("r2").get<int>();
  p.r3 = j.at("r3").get<int>();
  p.r_base = j.value("r_base", p.r2);
  return p;
}

StationRole parse_role(const std::string& s) {
  if (s == "video_sender") return StationRole::video_sender;
  if (s == "saturated_cross") return StationRole::saturated_cross;
  if (s == "poisson_cross") return StationRole::poisson_cross;
  throw std::invalid_argument("config: unknown station role '" + s + "'");
}

DcfConfig parse_dcf(const json& j) {
  DcfConfig d;
  for (const auto& s : j.at("stations")) {
    StationConfig st;
    st.role = parse_role(s.at("role").get<std::string>());
    st.packet_rate_hz = s.value("packet_rate_hz", 0.0);
    st.packet_bytes = s.value("packet_bytes", 1500);
    st.retry_limit = s.value("retry_limit", 0);
    d.stations.push_back(st);
  }
  d.cw_min = j.value("cw_min", d.cw_min);
  d.cw_max = j.value("cw_max", d.cw_max);
  d.slot_time_us = j.value("slot_time_us", d.slot_time_us);
  d.header_slots = j.value("header_slots", d.header_slots);
  d.bytes_per_slot = j.value("bytes_per_slot", d.bytes_per_slot);
  d.default_retry = j.value("default_retry", d.default_retry);
  d.queue_limit = j.value("queue_limit", d.queue_limit);
  return d;
}

}  // namespace

void RunConfig::validate() const {
  policy.validate();
  if (video.fps <= 0) throw std::invalid_argument("config: fps must be positive");
  if (video.n_frames < 1) throw std::invalid_argument("config: n_frames must be >= 1");
  if (video.mtu_payload < 1) throw std::invalid_argument("config: mtu_payload must be >= 1");
  if (video.trace.empty() && (video.idr_bytes <= 0 || video.p_bytes <= 0)) {
    throw std::invalid_argument("config: frame sizes must be positive");
  }
  if (timing.rtt_ms < 0 || timing.detection_delay_ms < 0) {
    throw std::invalid_argument("config: delays must be nonnegative");
  }
  if (mode == ChannelMode::abstract_channel) {
    if (!(channel_p >= 0.0 && channel_p < 1.0)) {
      throw std::invalid_argument("config: channel p must be in [0, 1)");
    }
  } else {
    dcf.validate();
    video_station_index();
  }
  if (window_mode == WindowMode::sliding && window_packets == 0) {
    throw std::invalid_argument("config: sliding window needs window_packets > 0");
  }
}

int RunConfig::nominal_interval_frames() const {
  const double frames = feedback_delay_seconds() * video.fps;
  const int d = static_cast<int>(std::ceil(frames - 1e-9));
  return std::max(1, d);
}

int RunConfig::video_station_index() const {
  for (size_t i = 0; i < dcf.stations.size(); ++i) {
    if (dcf.stations[i].role == StationRole::video_sender) return static_cast<int>(i);
  }
  throw std::invalid_argument("config: dcf mode needs a video_sender station");
}

std::string RunConfig::scenario_label() const {
  std::ostringstream out;
  if (mode == ChannelMode::abstract_channel) {
    out << "abstract_p" << format_double(channel_p);
  } else {
    out << "dcf_n" << dcf.stations.size();
    double poisson_rate = 0.0;
    for (const auto& st : dcf.stations) {
      if (st.role == StationRole::poisson_cross) poisson_rate += st.packet_rate_hz;
    }
    if (poisson_rate > 0) out << "_rate" << format_double(poisson_rate);
  }
  out << "_rtt" << format_double(timing.rtt_ms);
  out << "_R" << policy.r1 << "-" << policy.r2 << "-" << policy.r3;
  return out.str();
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig cfg;
  if (j.contains("mode")) {
    const auto mode = j["mode"].get<std::string>();
    if (mode == "abstract") {
      cfg.mode = ChannelMode::abstract_channel;
    } else if (mode == "dcf") {
      cfg.mode = ChannelMode::dcf;
    } else {
      throw std::invalid_argument("config: mode must be 'abstract' or 'dcf'");
    }
  }
  if (j.contains("method")) {
    const auto method = j["method"].get<std::string>();
    if (method == "baseline") {
      cfg.method = Method::baseline;
    } else if (method == "proposed") {
      cfg.method = Method::proposed;
    } else {
      throw std::invalid_argument("config: method must be 'baseline' or 'proposed'");
    }
  }
  if (j.contains("policy")) cfg.policy = parse_policy(j["policy"]);
  if (j.contains("video")) {
    const auto& v = j["video"];
    cfg.video.fps = v.value("fps", cfg.video.fps);
    cfg.video.n_frames = v.value("n_frames", cfg.video.n_frames);
    cfg.video.idr_bytes = v.value("idr_bytes", cfg.video.idr_bytes);
    cfg.video.p_bytes = v.value("p_bytes", cfg.video.p_bytes);
    cfg.video.mtu_payload = v.value("mtu_payload", cfg.video.mtu_payload);
    cfg.video.trace = v.value("trace", cfg.video.trace);
  }
  if (j.contains("timing")) {
    const auto& t = j["timing"];
    cfg.timing.rtt_ms = t.value("rtt_ms", cfg.timing.rtt_ms);
    cfg.timing.detection_delay_ms = t.value("detection_delay_ms", cfg.timing.detection_delay_ms);
  }
  if (j.contains("channel")) {
    const auto& c = j["channel"];
    if (c.contains("stations")) {
      cfg.mode = ChannelMode::dcf;
      cfg.dcf = parse_dcf(c);
    } else if (c.contains("p")) {
      cfg.channel_p = c["p"].get<double>();
    } else {
      throw std::invalid_argument("config: channel needs either 'p' or 'stations'");
    }
  }
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("window_mode")) {
    const auto w = j["window_mode"].get<std::string>();
    if (w == "cumulative") {
      cfg.window_mode = WindowMode::cumulative;
    } else if (w == "sliding") {
      cfg.window_mode = WindowMode::sliding;
    } else {
      throw std::invalid_argument("config: window_mode must be 'cumulative' or 'sliding'");
    }
  }
  cfg.window_packets = j.value("window_packets", cfg.window_packets);
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

SweepGrid parse_sweep_grid(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  SweepGrid grid;
  if (!j.contains("grid")) return grid;
  const auto& g = j["grid"];
  if (g.contains("p")) grid.p = g["p"].get<std::vector<double>>();
  if (g.contains("rtt_ms")) grid.rtt_ms = g["rtt_ms"].get<std::vector<double>>();
  if (g.contains("policy")) {
    for (const auto& pj : g["policy"]) grid.policies.push_back(parse_policy(pj));
  }
  if (g.contains("cross_rate_scale")) {
    grid.cross_rate_scale = g["cross_rate_scale"].get<std::vector<double>>();
  }
  return grid;
}

std::vector<RunConfig> expand_grid(const RunConfig& base, const SweepGrid& grid) {
  std::vector<RunConfig> out{base};
  auto apply = [&out](auto&& values, auto&& setter) {
    if (values.empty()) return;
    std::vector<RunConfig> next;
    next.reserve(out.size() * values.size());
    for (const auto& cfg : out) {
      for (const auto& v : values) {
        RunConfig c = cfg;
        setter(c, v);
        next.push_back(c);
      }
    }
    out = std::move(next);
  };
  apply(grid.p, [](RunConfig& c, double v) { c.channel_p = v; });
  apply(grid.rtt_ms, [](RunConfig& c, double v) { c.timing.rtt_ms = v; });
  apply(grid.policies, [](RunConfig& c, const RetryPolicy& v) { c.policy = v; });
  apply(grid.cross_rate_scale, [](RunConfig& c, double v) {
    for (auto& st : c.dcf.stations) {
      if (st.role == StationRole::poisson_cross) st.packet_rate_hz *= v;
    }
  });
  for (const auto& c : out) c.validate();
  return out;
}

}  // namespace retrysim
