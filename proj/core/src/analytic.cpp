#include "retrysim/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace retrysim {

double pow_int(double base, int exponent) {
  if (exponent < 0) {
    throw std::invalid_argument("pow_int: negative exponent");
  }
  double result = 1.0;
  double factor = base;
  int e = exponent;
  while (e > 0) {
    if (e & 1) result *= factor;
    factor *= factor;
    e >>= 1;
  }
  return result;
}

void RetryPolicy::validate() const {
  if (r3 < 1 || !(r1 > r2 && r2 > r3)) {
    throw std::invalid_argument("RetryPolicy: requires r1 > r2 > r3 >= 1");
  }
  if (r2 != r_base) {
    throw std::invalid_argument("RetryPolicy: requires r2 == r_base");
  }
}

int RetryPolicy::limit_for(int priority) const {
  switch (priority) {
    case 1: return r1;
    case 2: return r2;
    case 3: return r3;
    default: throw std::invalid_argument("RetryPolicy: priority must be 1, 2 or 3");
  }
}

void VideoModelParams::validate() const {
  if (p_packets < 1 || idr_packets <= p_packets) {
    throw std::invalid_argument("VideoModelParams: requires idr_packets > p_packets >= 1");
  }
  if (interval_frames < 1) {
    throw std::invalid_argument("VideoModelParams: requires interval_frames >= 1");
  }
}

void AnalyticParams::validate() const {
  policy.validate();
  if (!(p >= 0.0 && p <= p_tilde && p_tilde < 1.0)) {
    throw std::invalid_argument("AnalyticParams: requires 0 <= p <= p_tilde < 1");
  }
}

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::invalid_argument(std::string(what) + ": probability must be in [0, 1)");
  }
}

}  // namespace

double expected_attempts(double p, int retry_limit) {
  check_probability(p, "expected_attempts");
  if (retry_limit < 1) {
    throw std::invalid_argument("expected_attempts: retry_limit must be >= 1");
  }
  return (1.0 - pow_int(p, retry_limit)) / (1.0 - p);
}

double loss_rate(double p, int retry_limit) {
  check_probability(p, "loss_rate");
  if (retry_limit < 1) {
    throw std::invalid_argument("loss_rate: retry_limit must be >= 1");
  }
  return pow_int(p, retry_limit);
}

double expected_frozen_baseline(double p0, double packets, int interval_frames) {
  if (p0 < 0 || packets < 0) {
    throw std::invalid_argument("expected_frozen_baseline: negative input");
  }
  if (interval_frames < 1) {
    throw std::invalid_argument("expected_frozen_baseline: interval_frames must be >= 1");
  }
  return p0 * packets * interval_frames;
}

double expected_frozen_proposed(double p1, double n1, double p2, double n2,
                                int interval_frames) {
  if (p1 < 0 || n1 < 0 || p2 < 0 || n2 < 0) {
    throw std::invalid_argument("expected_frozen_proposed: negative input");
  }
  if (interval_frames < 1) {
    throw std::invalid_argument("expected_frozen_proposed: interval_frames must be >= 1");
  }
  return (p1 * n1 + p2 * n2) * interval_frames;
}

IntervalPacketCounts frozen_interval_packet_counts(double expected_frozen,
                                                   const VideoModelParams& params) {
  params.validate();
  if (expected_frozen < 0) {
    throw std::invalid_argument("frozen_interval_packet_counts: negative frozen count");
  }
  const double big_d = params.interval_frames;
  IntervalPacketCounts out;
  // One frame per interval carries the triggering loss; the other D-1 are
  // priority 3. D == 1 leaves no room for priority-3 frames.
  out.low_priority = (big_d - 1.0) / big_d * expected_frozen * params.p_packets;
  out.idr = (expected_frozen / big_d + 1.0) * params.idr_packets;
  return out;
}

double expected_packets_baseline(double n_frames, const VideoModelParams& params,
                                 double p0) {
  params.validate();
  check_probability(p0, "expected_packets_baseline");
  if (n_frames < 1) {
    throw std::invalid_argument("expected_packets_baseline: n_frames must be >= 1");
  }
  const double delta = params.delta();
  if (p0 * delta >= 1.0) {
    throw std::invalid_argument(
        "expected_packets_baseline: p0 * (d - d') >= 1, fixed point does not exist");
  }
  return (params.p_packets * n_frames + delta) / (1.0 - p0 * delta);
}

double expected_packets_proposed(double n_frames, const VideoModelParams& params,
                                 double p1) {
  const StationaryDist q = stationary_closed_form(params, p1);
  // Frames per packet under the stationary mix; invert for packets/frame.
  const double frames_per_packet =
      q.q_idr_state + q.q_p_state + (params.interval_frames - 1.0) * q.q_low_state;
  return n_frames / frames_per_packet;
}

double sufficient_condition_margin(double p, const RetryPolicy& policy,
                                   double interval_frames, double p_packets) {
  check_probability(p, "sufficient_condition_margin");
  policy.validate();
  const double gain = pow_int(p, policy.r3 + policy.r1 - policy.r_base) -
                      pow_int(p, policy.r1);
  const double cost = 1.0 - pow_int(p, policy.r1 - policy.r_base);
  return gain * (interval_frames - 1.0) * p_packets - cost;
}

double sufficient_condition_margin(double p, const RetryPolicy& policy,
                                   const VideoModelParams& params) {
  params.validate();
  return sufficient_condition_margin(p, policy, params.interval_frames,
                                     params.p_packets);
}

double TransitionMatrix::row_sum(int row) const {
  double s = 0.0;
  for (int c = 0; c < n_; ++c) s += at(row, c);
  return s;
}

TransitionMatrix markov_transition_matrix(const VideoModelParams& params, double p1) {
  params.validate();
  check_probability(p1, "markov_transition_matrix");
  const MarkovLayout ls(params);
  const double frame_ok_idr = pow_int(1.0 - p1, ls.d);
  const double frame_ok_p = pow_int(1.0 - p1, ls.dp);

  TransitionMatrix m(ls.size());
  for (int i = 0; i + 1 < ls.d; ++i) {
    m.at(ls.idr(i), ls.idr(i + 1)) = 1.0;
  }
  for (int j = 0; j + 1 < ls.dp; ++j) {
    m.at(ls.pframe(j), ls.pframe(j + 1)) = 1.0;
  }
  const int fail_target = ls.big_d > 1 ? ls.low(0) : ls.idr(0);
  m.at(ls.idr(ls.d - 1), ls.pframe(0)) += frame_ok_idr;
  m.at(ls.idr(ls.d - 1), fail_target) += 1.0 - frame_ok_idr;
  m.at(ls.pframe(ls.dp - 1), ls.pframe(0)) += frame_ok_p;
  m.at(ls.pframe(ls.dp - 1), fail_target) += 1.0 - frame_ok_p;
  if (ls.big_d > 1) {
    const int low_n = ls.low_states();
    for (int k = 0; k + 1 < low_n; ++k) {
      m.at(ls.low(k), ls.low(k + 1)) = 1.0;
    }
    m.at(ls.low(low_n - 1), ls.idr(0)) = 1.0;
  }
  return m;
}

namespace {

double stationary_residual(const TransitionMatrix& m, const std::vector<double>& pi) {
  const int n = m.size();
  double worst = 0.0;
  for (int c = 0; c < n; ++c) {
    double v = 0.0;
    for (int r = 0; r < n; ++r) v += pi[r] * m.at(r, c);
    worst = std::max(worst, std::fabs(v - pi[c]));
  }
  return worst;
}

// pi (P^T - I) = 0 with one row replaced by the normalization constraint,
// solved by Gaussian elimination with partial pivoting.
bool stationary_linear_solve(const TransitionMatrix& m, std::vector<double>& pi) {
  const int n = m.size();
  std::vector<double> a(static_cast<size_t>(n) * (n + 1), 0.0);
  auto cell = [&](int r, int c) -> double& { return a[static_cast<size_t>(r) * (n + 1) + c]; };
  for (int r = 0; r < n - 1; ++r) {
    for (int c = 0; c < n; ++c) {
      cell(r, c) = m.at(c, r) - (r == c ? 1.0 : 0.0);
    }
  }
  for (int c = 0; c < n; ++c) cell(n - 1, c) = 1.0;
  cell(n - 1, n) = 1.0;

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::fabs(cell(r, col)) > std::fabs(cell(pivot, col))) pivot = r;
    }
    if (std::fabs(cell(pivot, col)) < 1e-14) return false;
    if (pivot != col) {
      for (int c = col; c <= n; ++c) std::swap(cell(pivot, c), cell(col, c));
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = cell(r, col) / cell(col, col);
      if (f == 0.0) continue;
      for (int c = col; c <= n; ++c) cell(r, c) -= f * cell(col, c);
    }
  }
  pi.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double v = cell(r, n);
    for (int c = r + 1; c < n; ++c) v -= cell(r, c) * pi[c];
    pi[r] = v / cell(r, r);
  }
  double total = 0.0;
  for (double& v : pi) {
    if (v < 0.0 && v > -1e-12) v = 0.0;
    if (v < 0.0) return false;
    total += v;
  }
  if (total <= 0.0) return false;
  for (double& v : pi) v /= total;
  return true;
}

}  // namespace

std::vector<double> stationary_numeric(const TransitionMatrix& matrix) {
  constexpr double kTolerance = 1e-12;
  const int n = matrix.size();
  for (int r = 0; r < n; ++r) {
    if (std::fabs(matrix.row_sum(r) - 1.0) > 1e-9) {
      throw std::invalid_argument("stationary_numeric: matrix is not row-stochastic");
    }
  }
  std::vector<double> pi;
  if (stationary_linear_solve(matrix, pi) &&
      stationary_residual(matrix, pi) < kTolerance) {
    return pi;
  }
  // Damped power iteration; the 1/2 self-loop removes periodicity.
  pi.assign(n, 1.0 / n);
  std::vector<double> next(n, 0.0);
  for (long iter = 0; iter < 5'000'000; ++iter) {
    for (int c = 0; c < n; ++c) next[c] = 0.5 * pi[c];
    for (int r = 0; r < n; ++r) {
      const double w = 0.5 * pi[r];
      if (w == 0.0) continue;
      for (int c = 0; c < n; ++c) next[c] += w * matrix.at(r, c);
    }
    double total = 0.0;
    for (double v : next) total += v;
    for (double& v : next) v /= total;
    pi.swap(next);
    if (iter % 16 == 15 && stationary_residual(matrix, pi) < kTolerance) {
      return pi;
    }
  }
  throw std::runtime_error("stationary_numeric: power iteration did not converge");
}

StationaryDist stationary_closed_form(const VideoModelParams& params, double p1) {
  params.validate();
  if (!(p1 >= 0.0 && p1 <= 1.0)) {
    throw std::invalid_argument("stationary_closed_form: p1 must be in [0, 1]");
  }
  const double d = params.idr_packets;
  const double dp = params.p_packets;
  const double big_d = params.interval_frames;

  StationaryDist out;
  if (p1 == 0.0) {
    // Lossless limit: the chain never leaves the P-frame cycle.
    out.q_idr_state = 0.0;
    out.q_p_state = 1.0 / dp;
    out.q_low_state = 0.0;
    out.q_idr_total = 0.0;
    out.frame_ok_idr = 1.0;
    out.frame_ok_p = 1.0;
    return out;
  }
  const double frame_ok_idr = pow_int(1.0 - p1, params.idr_packets);
  const double frame_ok_p = pow_int(1.0 - p1, params.p_packets);
  const double denom =
      (d + (big_d - 1.0) * dp) * (1.0 - frame_ok_p) + frame_ok_idr * dp;
  out.q_idr_state = (1.0 - frame_ok_p) / denom;
  out.q_p_state = frame_ok_idr / denom;
  out.q_low_state = out.q_idr_state;
  out.q_idr_total = d * out.q_idr_state;
  out.frame_ok_idr = frame_ok_idr;
  out.frame_ok_p = frame_ok_p;
  return out;
}

double frozen_bound(double frozen_baseline, double p0, double p1,
                    double d, double dp, double big_d) {
  if (frozen_baseline < 0 || p0 < 0 || p1 < 0) {
    throw std::invalid_argument("frozen_bound: negative input");
  }
  if (p1 > p0) {
    throw std::invalid_argument("frozen_bound: requires p1 <= p0");
  }
  const double denom =
      ((d + (big_d - 1.0) * dp) * (1.0 - (dp - 1.0) / 2.0 * p1) - d) * p0 + 1.0;
  if (denom <= 0.0) return frozen_baseline;
  return std::min(frozen_baseline, frozen_baseline / denom);
}

double frozen_bound(double frozen_baseline, double p0, double p1,
                    const VideoModelParams& params) {
  params.validate();
  return frozen_bound(frozen_baseline, p0, p1, params.idr_packets,
                      params.p_packets, params.interval_frames);
}

namespace {

double bianchi_tau(double p, int w0, int stages, int retry) {
  double num = 0.0;
  double den = 0.0;
  double pk = 1.0;
  for (int i = 0; i < retry; ++i, pk *= p) {
    const double wi = static_cast<double>(w0) * pow_int(2.0, std::min(i, stages));
    num += pk;
    den += pk * (wi + 1.0) / 2.0;
  }
  return num / den;
}

}  // namespace

BianchiPoint bianchi_fixed_point(int n_stations, int min_window_slots,
                                 int max_backoff_stages, int retry_limit) {
  if (n_stations < 1 || min_window_slots < 1 || max_backoff_stages < 0 ||
      retry_limit < 1) {
    throw std::invalid_argument("bianchi_fixed_point: bad arguments");
  }
  if (n_stations == 1) {
    return {bianchi_tau(0.0, min_window_slots, max_backoff_stages, retry_limit), 0.0};
  }
  auto mismatch = [&](double p) {
    const double tau = bianchi_tau(p, min_window_slots, max_backoff_stages, retry_limit);
    return p - (1.0 - std::pow(1.0 - tau, n_stations - 1));
  };
  double lo = 0.0, hi = 1.0 - 1e-12;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mismatch(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double p = 0.5 * (lo + hi);
  if (std::fabs(mismatch(p)) > 1e-10) {
    throw std::runtime_error("bianchi_fixed_point: did not converge");
  }
  return {bianchi_tau(p, min_window_slots, max_backoff_stages, retry_limit), p};
}

}  // namespace retrysim
