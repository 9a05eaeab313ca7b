#pragma once

#include <cstdint>
#include <vector>

// Closed-form performance model for retry-limit scheduling of IPPP video:
// per-packet attempt/loss formulas, frozen-frame expectations, the
// packet-class Markov chain with its stationary distribution (closed form
// and a numeric solver used as an independent oracle), the sufficient
// condition for compatibility, the frozen-frame upper bound, and a
// saturated-DCF fixed point used to validate the slotted channel backend.

namespace retrysim {

/// base^exponent by squaring; exponent must be >= 0.
double pow_int(double base, int exponent);

// The three per-priority retry limits plus the fixed limit used by an
// unmodified sender. Priority 1 is the most protected class.
struct RetryPolicy {
  int r1 = 8;
  int r2 = 7;
  int r3 = 1;
  int r_base = 7;

  // Requires r1 > r2 > r3 >= 1 and r2 == r_base.
  void validate() const;
  int limit_for(int priority) const;  // priority in {1,2,3}
};

// Packetization profile of the source: packets per IDR frame (d), packets
// per P frame (d'), and frames spanned by one feedback delay (D).
struct VideoModelParams {
  int idr_packets = 10;
  int p_packets = 2;
  int interval_frames = 3;

  void validate() const;  // requires idr_packets > p_packets >= 1, interval_frames >= 1
  int delta() const { return idr_packets - p_packets; }
};

// Collision probabilities for the two scenarios (proposed-method sender vs
// unmodified sender) and the per-class loss rates they induce.
struct AnalyticParams {
  double p = 0.0;        // per-attempt collision probability, proposed scenario
  double p_tilde = 0.0;  // per-attempt collision probability, baseline scenario
  RetryPolicy policy{};

  void validate() const;  // requires 0 <= p <= p_tilde < 1
  double p0() const { return pow_int(p_tilde, policy.r_base); }
  double p1() const { return pow_int(p, policy.r1); }
  double p2() const { return pow_int(p, policy.r2); }
  double p3() const { return pow_int(p, policy.r3); }
};

// Stationary distribution of the packet-class chain. States within one
// class share the same probability, so one value per class suffices.
struct StationaryDist {
  double q_idr_state = 0;   // probability of each IDR-packet state
  double q_p_state = 0;     // probability of each priority-1 P-packet state
  double q_low_state = 0;   // probability of each priority-3 packet state
  double q_idr_total = 0;   // idr_packets * q_idr_state
  double frame_ok_idr = 0;  // P_a: whole IDR frame delivered
  double frame_ok_p = 0;    // P_b: whole P frame delivered
};

/// Mean transmission attempts per packet: (1 - p^r) / (1 - p).
double expected_attempts(double p, int retry_limit);

/// Drop probability after exhausting the retry limit: p^r.
double loss_rate(double p, int retry_limit);

/// Expected frozen frames for a fixed-limit sender: p0 * packets * D.
double expected_frozen_baseline(double p0, double packets, int interval_frames);

/// Expected frozen frames under the retry-limit scheduler:
/// (p1*n1 + p2*n2) * D.
double expected_frozen_proposed(double p1, double n1, double p2, double n2,
                                int interval_frames);

struct IntervalPacketCounts {
  double low_priority = 0;  // expected priority-3 packets
  double idr = 0;           // expected packets belonging to IDR frames
};

/// Packet counts implied by the expected frozen-frame total: priority-3
/// packets ((D-1)/D * N'_f * d', zero when D == 1) and IDR packets
/// ((N'_f/D + 1) * d, the +1 being the leading IDR frame).
IntervalPacketCounts frozen_interval_packet_counts(double expected_frozen,
                                                   const VideoModelParams& params);

/// Expected total packets for n_frames frames under a fixed-limit sender,
/// solving n = (p0*n + 1)*d + (N - (p0*n + 1))*d'. Requires p0*(d-d') < 1.
double expected_packets_baseline(double n_frames, const VideoModelParams& params,
                                 double p0);

/// Expected total packets for n_frames frames under the scheduler, derived
/// from the stationary per-frame packet mix of the class chain.
double expected_packets_proposed(double n_frames, const VideoModelParams& params,
                                 double p1);

/// Margin of the sufficient compatibility condition
/// (p^{R3+R1-R} - p^{R1})(D-1)d' - (1 - p^{R1-R}); the condition holds iff
/// the returned value is positive.
double sufficient_condition_margin(double p, const RetryPolicy& policy,
                                   const VideoModelParams& params);
double sufficient_condition_margin(double p, const RetryPolicy& policy,
                                   double interval_frames, double p_packets);

// Dense row-major square matrix, just big enough for the class chains.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {}
  int size() const { return n_; }
  double& at(int row, int col) { return a_[static_cast<size_t>(row) * n_ + col]; }
  double at(int row, int col) const { return a_[static_cast<size_t>(row) * n_ + col]; }
  double row_sum(int row) const;

 private:
  int n_;
  std::vector<double> a_;
};

// State indexing for the packet-class chain: IDR packet states first, then
// priority-1 P packet states, then (for D > 1) priority-3 packet states.
struct MarkovLayout {
  int d;
  int dp;
  int big_d;

  explicit MarkovLayout(const VideoModelParams& params)
      : d(params.idr_packets), dp(params.p_packets), big_d(params.interval_frames) {}
  int low_states() const { return (big_d - 1) * dp; }
  int size() const { return d + dp + low_states(); }
  int idr(int i) const { return i; }             // i in [0, d)
  int pframe(int j) const { return d + j; }      // j in [0, dp)
  int low(int k) const { return d + dp + k; }    // k in [0, (D-1)*dp)
};

/// Row-stochastic transition matrix of the packet-class chain.
/// Packets within a frame chain deterministically; the last packet of an
/// IDR (P) frame branches on whole-frame success P_a (P_b). Failures route
/// to the priority-3 run, or straight back to the IDR head when D == 1.
TransitionMatrix markov_transition_matrix(const VideoModelParams& params, double p1);

/// Stationary vector of a row-stochastic matrix: linear solve of
/// pi P = pi with a normalization row, power-iteration fallback.
/// Residual ||pi P - pi||_inf < 1e-12 on success.
std::vector<double> stationary_numeric(const TransitionMatrix& matrix);

/// Closed-form stationary distribution of the class chain. The p1 = 0
/// limit is returned explicitly (all mass on the P-frame cycle).
StationaryDist stationary_closed_form(const VideoModelParams& params, double p1);

/// Frozen-frame upper bound for the scheduler:
/// min{ N_f, N_f / ([(d+(D-1)d')(1-(d'-1)/2 p1) - d] p0 + 1) }.
double frozen_bound(double frozen_baseline, double p0, double p1,
                    const VideoModelParams& params);
double frozen_bound(double frozen_baseline, double p0, double p1,
                    double d, double dp, double big_d);

struct BianchiPoint {
  double tau = 0;  // per-station attempt probability per virtual slot
  double p = 0;    // conditional collision probability per attempt
};

/// Fixed point of the saturated-DCF coupled equations with a finite retry
/// limit. min_window_slots is the number of equally likely backoff values
/// at stage 0 (CW_min + 1); windows double for max_backoff_stages stages.
BianchiPoint bianchi_fixed_point(int n_stations, int min_window_slots,
                                 int max_backoff_stages, int retry_limit);

}  // namespace retrysim
