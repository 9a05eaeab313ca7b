#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "retrysim/analytic.hpp"

using namespace retrysim;

namespace {

// Independent oracle for the mean-attempts formula: sum the distribution
// of the attempt count term by term.
double attempts_series(double p, int r) {
  double total = 0.0;
  for (int k = 1; k <= r; ++k) {
    total += k * std::pow(p, k - 1) * (1.0 - p);
  }
  total += r * std::pow(p, r);
  return total;
}

double pow_repeated(double p, int r) {
  double v = 1.0;
  for (int i = 0; i < r; ++i) v *= p;
  return v;
}

// Fixed-point iteration of n = (p0 n + 1) d + (N - (p0 n + 1)) d'.
double packets_fixed_point(double n_frames, const VideoModelParams& vp, double p0) {
  double n = n_frames * vp.p_packets;
  for (int i = 0; i < 100000; ++i) {
    const double idr_frames = p0 * n + 1.0;
    const double next = idr_frames * vp.idr_packets +
                        (n_frames - idr_frames) * vp.p_packets;
    if (std::fabs(next - n) < 1e-11) return next;
    n = next;
  }
  return n;
}

const std::vector<VideoModelParams> kGrid = [] {
  std::vector<VideoModelParams> grid;
  for (int d : {2, 5, 10}) {
    for (int dp : {1, 2, 4}) {
      if (d <= dp) continue;
      for (int big_d : {1, 2, 3, 6}) {
        grid.push_back({d, dp, big_d});
      }
    }
  }
  return grid;
}();

const std::vector<double> kLossGrid = {1e-4, 1e-2, 0.1, 0.5};

}  // namespace

TEST_CASE("expected_attempts matches the explicit series") {
  CHECK(expected_attempts(0.0, 7) == 1.0);
  CHECK(expected_attempts(0.5, 2) == doctest::Approx(attempts_series(0.5, 2)).epsilon(1e-14));
  CHECK(expected_attempts(0.5, 2) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(expected_attempts(0.35, 7) == doctest::Approx(attempts_series(0.35, 7)).epsilon(1e-14));
  CHECK(expected_attempts(0.35, 7) == doctest::Approx(1.537472).epsilon(1e-6));

  for (int pi = 0; pi < 20; ++pi) {
    const double p = pi * 0.05;
    for (int r = 1; r <= 12; ++r) {
      CHECK(std::fabs(expected_attempts(p, r) - attempts_series(p, r)) < 1e-12);
      CHECK(expected_attempts(p, r) >= 1.0);
      CHECK(expected_attempts(p, r) <= r + 1e-12);
    }
  }
  CHECK_THROWS_AS(expected_attempts(-0.1, 7), std::invalid_argument);
  CHECK_THROWS_AS(expected_attempts(1.0, 7), std::invalid_argument);
  CHECK_THROWS_AS(expected_attempts(0.5, 0), std::invalid_argument);
}

TEST_CASE("loss_rate is the retry-limit power of p") {
  CHECK(loss_rate(0.0, 7) == 0.0);
  CHECK(loss_rate(0.45, 7) == doctest::Approx(pow_repeated(0.45, 7)).epsilon(1e-15));
  CHECK(loss_rate(0.45, 7) == doctest::Approx(0.003736).epsilon(1e-3));
  CHECK(loss_rate(0.35, 8) == doctest::Approx(pow_repeated(0.35, 8)).epsilon(1e-15));
  CHECK(loss_rate(0.35, 8) == doctest::Approx(2.2518e-4).epsilon(1e-4));
  CHECK_THROWS_AS(loss_rate(1.0, 7), std::invalid_argument);
}

TEST_CASE("pow_int agrees with repeated multiplication") {
  for (double base : {0.0, 0.3, 0.9999, 1.5}) {
    for (int e = 0; e <= 20; ++e) {
      CHECK(pow_int(base, e) == doctest::Approx(std::pow(base, e)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(pow_int(0.5, -1), std::invalid_argument);
}

TEST_CASE("frozen-frame expectations") {
  CHECK(expected_frozen_baseline(0.0, 1000, 3) == 0.0);
  CHECK(expected_frozen_baseline(0.0037, 623, 3) ==
        doctest::Approx(0.0037 * 623 * 3).epsilon(1e-15));
  CHECK(expected_frozen_baseline(0.01, 100, 1) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(expected_frozen_proposed(0.0, 500, 0.0, 0, 3) == 0.0);
  CHECK(expected_frozen_proposed(0.001, 600, 0.003736, 0, 3) ==
        doctest::Approx(1.8).epsilon(1e-12));
  CHECK(expected_frozen_proposed(0.01, 100, 0.02, 50, 2) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(expected_frozen_baseline(-0.1, 10, 3), std::invalid_argument);
}

TEST_CASE("packet counts implied by the frozen-frame total") {
  const VideoModelParams vp{10, 2, 3};
  auto zero = frozen_interval_packet_counts(0.0, vp);
  CHECK(zero.low_priority == 0.0);
  CHECK(zero.idr == doctest::Approx(10.0));

  auto six = frozen_interval_packet_counts(6.0, vp);
  CHECK(six.low_priority == doctest::Approx(2.0 / 3.0 * 6.0 * 2.0).epsilon(1e-15));
  CHECK(six.low_priority == doctest::Approx(8.0));
  CHECK(six.idr == doctest::Approx(30.0));

  const VideoModelParams instant{10, 2, 1};
  auto five = frozen_interval_packet_counts(5.0, instant);
  CHECK(five.low_priority == 0.0);
  CHECK(five.idr == doctest::Approx(60.0));
}

TEST_CASE("expected_packets_baseline solves the defining fixed point") {
  const VideoModelParams vp{10, 2, 3};
  CHECK(expected_packets_baseline(295, vp, 0.0) == doctest::Approx(598.0).epsilon(1e-12));
  CHECK(expected_packets_baseline(1, vp, 0.0) == doctest::Approx(10.0).epsilon(1e-12));

  const double closed = expected_packets_baseline(295, vp, 0.005);
  CHECK(closed == doctest::Approx(packets_fixed_point(295, vp, 0.005)).epsilon(1e-9));
  CHECK(closed == doctest::Approx(622.9).epsilon(1e-3));

  CHECK_THROWS_AS(expected_packets_baseline(295, vp, 0.2), std::invalid_argument);
}

TEST_CASE("sufficient condition margin, term by term") {
  const RetryPolicy policy{8, 7, 1, 7};
  const VideoModelParams d3{10, 2, 3};
  const VideoModelParams d1{10, 2, 1};

  CHECK(sufficient_condition_margin(0.0, policy, d3) == doctest::Approx(-1.0));

  const double p = 0.45;
  const double oracle = (pow_repeated(p, 2) - pow_repeated(p, 8)) * 2.0 * 2.0 -
                        (1.0 - pow_repeated(p, 1));
  CHECK(sufficient_condition_margin(p, policy, d3) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(sufficient_condition_margin(p, policy, d3) == doctest::Approx(0.2531).epsilon(1e-3));
  CHECK(sufficient_condition_margin(0.35, policy, d1) == doctest::Approx(-0.65).epsilon(1e-12));
}

TEST_CASE("condition margin is nondecreasing in D and d'") {
  const RetryPolicy policy{8, 7, 1, 7};
  for (double p : {0.1, 0.35, 0.45, 0.7}) {
    double prev = -1e18;
    for (int big_d : {1, 2, 3, 6, 12}) {
      const double m = sufficient_condition_margin(p, policy, VideoModelParams{10, 2, big_d});
      CHECK(m >= prev - 1e-12);
      prev = m;
    }
    prev = -1e18;
    for (int dp : {1, 2, 4, 8}) {
      const double m = sufficient_condition_margin(p, policy, VideoModelParams{16, dp, 3});
      CHECK(m >= prev - 1e-12);
      prev = m;
    }
  }
}

TEST_CASE("transition matrix structure") {
  const VideoModelParams tiny{2, 1, 2};
  SUBCASE("lossless chain drains into the P-frame cycle") {
    // d=2 keeps idr_packets > p_packets; with p1 = 0 all branch mass goes
    // to the P states and the P cycle is absorbing.
    auto m = markov_transition_matrix(tiny, 0.0);
    const MarkovLayout ls(tiny);
    CHECK(m.size() == 4);
    CHECK(m.at(ls.idr(0), ls.idr(1)) == 1.0);
    CHECK(m.at(ls.idr(1), ls.pframe(0)) == 1.0);
    CHECK(m.at(ls.pframe(0), ls.pframe(0)) == 1.0);
    CHECK(m.at(ls.low(0), ls.idr(0)) == 1.0);
  }

  SUBCASE("rows are stochastic and branch probabilities match") {
    const VideoModelParams vp{10, 2, 3};
    auto m = markov_transition_matrix(vp, 0.01);
    const MarkovLayout ls(vp);
    CHECK(m.size() == 16);
    for (int r = 0; r < m.size(); ++r) {
      CHECK(std::fabs(m.row_sum(r) - 1.0) < 1e-12);
    }
    const double ok10 = std::pow(0.99, 10);
    CHECK(m.at(ls.idr(9), ls.pframe(0)) == doctest::Approx(ok10).epsilon(1e-12));
    CHECK(m.at(ls.idr(9), ls.pframe(0)) == doctest::Approx(0.904382).epsilon(1e-6));
    CHECK(m.at(ls.idr(9), ls.low(0)) == doctest::Approx(1.0 - ok10).epsilon(1e-12));
    CHECK(m.at(ls.low(3), ls.idr(0)) == 1.0);
  }

  SUBCASE("D == 1 drops the priority-3 row") {
    const VideoModelParams vp{10, 2, 1};
    auto m = markov_transition_matrix(vp, 0.2);
    const MarkovLayout ls(vp);
    CHECK(m.size() == 12);
    CHECK(m.at(ls.idr(9), ls.idr(0)) == doctest::Approx(1.0 - std::pow(0.8, 10)));
    CHECK(m.at(ls.pframe(1), ls.idr(0)) == doctest::Approx(1.0 - 0.64));
    for (int r = 0; r < m.size(); ++r) {
      CHECK(std::fabs(m.row_sum(r) - 1.0) < 1e-12);
    }
  }

  CHECK_THROWS_AS(markov_transition_matrix(tiny, 1.5), std::invalid_argument);
}

TEST_CASE("stationary_numeric on a permutation cycle is uniform") {
  const int k = 7;
  TransitionMatrix cycle(k);
  for (int i = 0; i < k; ++i) cycle.at(i, (i + 1) % k) = 1.0;
  auto pi = stationary_numeric(cycle);
  for (double v : pi) {
    CHECK(v == doctest::Approx(1.0 / k).epsilon(1e-12));
  }
}

TEST_CASE("stationary residual is below 1e-12 across the grid") {
  for (const auto& vp : kGrid) {
    for (double p1 : kLossGrid) {
      auto m = markov_transition_matrix(vp, p1);
      auto pi = stationary_numeric(m);
      double sum = 0.0;
      for (double v : pi) sum += v;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      double residual = 0.0;
      for (int c = 0; c < m.size(); ++c) {
        double v = 0.0;
        for (int r = 0; r < m.size(); ++r) v += pi[r] * m.at(r, c);
        residual = std::max(residual, std::fabs(v - pi[c]));
      }
      CHECK(residual < 1e-12);
    }
  }
}

TEST_CASE("closed-form stationary distribution matches the numeric oracle") {
  for (const auto& vp : kGrid) {
    for (double p1 : kLossGrid) {
      CAPTURE(vp.idr_packets);
      CAPTURE(vp.p_packets);
      CAPTURE(vp.interval_frames);
      CAPTURE(p1);
      const auto closed = stationary_closed_form(vp, p1);
      const auto pi = stationary_numeric(markov_transition_matrix(vp, p1));
      const MarkovLayout ls(vp);
      for (int i = 0; i < ls.d; ++i) {
        CHECK(std::fabs(pi[ls.idr(i)] - closed.q_idr_state) < 1e-9);
      }
      for (int j = 0; j < ls.dp; ++j) {
        CHECK(std::fabs(pi[ls.pframe(j)] - closed.q_p_state) < 1e-9);
      }
      for (int k = 0; k < ls.low_states(); ++k) {
        CHECK(std::fabs(pi[ls.low(k)] - closed.q_low_state) < 1e-9);
      }
      // Normalization identity of the closed form.
      const double total = ls.d * closed.q_idr_state + ls.dp * closed.q_p_state +
                           ls.low_states() * closed.q_low_state;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("closed-form limits") {
  const VideoModelParams vp{10, 2, 3};
  SUBCASE("p1 -> 0 gives no IDR mass") {
    const auto q = stationary_closed_form(vp, 0.0);
    CHECK(q.q_idr_total == 0.0);
    CHECK(q.q_p_state == doctest::Approx(0.5));
  }
  SUBCASE("p1 = 1 alternates IDR frames and frozen intervals") {
    const auto q = stationary_closed_form(vp, 1.0);
    CHECK(q.q_idr_total == doctest::Approx(10.0 / 14.0).epsilon(1e-12));
    CHECK(q.q_p_state == 0.0);
  }
  SUBCASE("reference point") {
    const auto q = stationary_closed_form(vp, 0.01);
    CHECK(q.q_idr_total == doctest::Approx(0.09533).epsilon(1e-4));
  }
}

TEST_CASE("proposed packet totals stay below the baseline for equal frames") {
  const RetryPolicy policy{8, 7, 1, 7};
  for (const auto& vp : kGrid) {
    for (double p1 : kLossGrid) {
      // Derive the channel probability from the priority-1 loss rate, then
      // the baseline drop rate from the shared channel.
      const double p = std::pow(p1, 1.0 / policy.r1);
      const double p0 = pow_repeated(p, policy.r_base);
      if (p0 * vp.delta() >= 1.0) continue;
      const double n_base = expected_packets_baseline(295, vp, p0);
      const double n_prop = expected_packets_proposed(295, vp, p1);
      CAPTURE(vp.idr_packets);
      CAPTURE(vp.p_packets);
      CAPTURE(vp.interval_frames);
      CAPTURE(p1);
      CHECK(n_prop < n_base);
    }
  }
}

TEST_CASE("mean-field attempt budget: baseline covers the proposed mix") {
  // Expected-attempt form of the compatibility constraint, with the
  // per-class packet mix taken from the stationary chain. The budget side
  // must dominate whenever the baseline channel is no better, and the
  // reduced (observable) form must hold strictly wherever the sufficient
  // condition is positive.
  const RetryPolicy policy{8, 7, 1, 7};
  for (const auto& vp : kGrid) {
    for (double p1 : kLossGrid) {
      for (double bump : {1.0, 1.2, 2.0}) {
        const double p = std::pow(p1, 1.0 / policy.r1);
        const double p_tilde = std::min(p * bump, 0.98);
        const double p0 = pow_repeated(p_tilde, policy.r_base);
        const double p2 = pow_repeated(p, policy.r2);
        const double p3 = pow_repeated(p, policy.r3);
        if (p0 * vp.delta() >= 1.0) continue;
        const double n_base = expected_packets_baseline(295, vp, p0);
        const double n_prop = expected_packets_proposed(295, vp, p1);
        const auto q = stationary_closed_form(vp, p1);
        const double n1 = (q.q_idr_total + vp.p_packets * q.q_p_state) * n_prop;
        const double n3 =
            (vp.interval_frames - 1.0) * vp.p_packets * q.q_low_state * n_prop;
        CAPTURE(vp.idr_packets);
        CAPTURE(vp.p_packets);
        CAPTURE(vp.interval_frames);
        CAPTURE(p1);
        CAPTURE(bump);
        const double budget = (1.0 - p0) / (1.0 - p_tilde) * n_base;
        const double spent = ((1.0 - p1) * n1 + (1.0 - p3) * n3) / (1.0 - p);
        CHECK(budget >= spent);
        if (bump == 1.0 && sufficient_condition_margin(p, policy, vp) > 0) {
          CHECK((1.0 - p2) * (n1 + n3) > (1.0 - p1) * n1 + (1.0 - p3) * n3);
        }
      }
    }
  }
}

TEST_CASE("frozen bound by direct substitution") {
  const VideoModelParams vp{10, 2, 3};
  CHECK(frozen_bound(0.0, 0.01, 0.001, vp) == 0.0);

  const double p0 = 6.4339e-4, p1 = 2.2518e-4;
  const double denom = ((10 + 2 * 2) * (1.0 - 0.5 * p1) - 10) * p0 + 1.0;
  CHECK(frozen_bound(100.0, p0, p1, vp) ==
        doctest::Approx(100.0 / denom).epsilon(1e-14));
  CHECK(frozen_bound(100.0, p0, p1, vp) == doctest::Approx(99.743).epsilon(1e-4));

  const VideoModelParams d4{10, 2, 4};
  const double denom4 = ((10 + 3 * 2) * (1.0 - 0.5 * 0.01) - 10) * 0.05 + 1.0;
  CHECK(frozen_bound(10.0, 0.05, 0.01, d4) ==
        doctest::Approx(10.0 / denom4).epsilon(1e-14));

  CHECK_THROWS_AS(frozen_bound(10.0, 0.001, 0.01, vp), std::invalid_argument);
}

TEST_CASE("frozen bound never exceeds the baseline expectation") {
  for (const auto& vp : kGrid) {
    for (double p0 : {1e-3, 1e-2, 0.1}) {
      for (double frac : {0.1, 0.5, 1.0}) {
        const double p1 = p0 * frac;
        const double b = frozen_bound(50.0, p0, p1, vp);
        CHECK(b <= 50.0 + 1e-12);
        if (vp.interval_frames > 1) {
          CHECK(b < 50.0);  // strictly tighter once priority-3 frames exist
        }
      }
    }
  }
}

TEST_CASE("bianchi fixed point") {
  SUBCASE("degenerate single station") {
    const auto pt = bianchi_fixed_point(1, 16, 5, 7);
    CHECK(pt.p == 0.0);
    CHECK(pt.tau > 0.0);
  }
  SUBCASE("residual identity and monotonicity in n") {
    double prev = 0.0;
    for (int n = 2; n <= 10; ++n) {
      const auto pt = bianchi_fixed_point(n, 16, 5, 7);
      CHECK(pt.p > 0.0);
      CHECK(pt.p < 1.0);
      CHECK(std::fabs(pt.p - (1.0 - std::pow(1.0 - pt.tau, n - 1))) < 1e-10);
      CHECK(pt.p > prev);
      prev = pt.p;
    }
  }
  CHECK_THROWS_AS(bianchi_fixed_point(0, 16, 5, 7), std::invalid_argument);
}

TEST_CASE("retry policy and params validation") {
  CHECK_NOTHROW(RetryPolicy{8, 7, 1, 7}.validate());
  CHECK_THROWS_AS((RetryPolicy{7, 7, 1, 7}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((RetryPolicy{8, 7, 0, 7}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((RetryPolicy{8, 6, 1, 7}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((VideoModelParams{2, 2, 3}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((VideoModelParams{10, 2, 0}.validate()), std::invalid_argument);

  AnalyticParams ap;
  ap.p = 0.35;
  ap.p_tilde = 0.35;
  CHECK_NOTHROW(ap.validate());
  CHECK(ap.p0() == doctest::Approx(pow_repeated(0.35, 7)).epsilon(1e-15));
  CHECK(ap.p1() < ap.p2());
  CHECK(ap.p2() < ap.p3());
  ap.p_tilde = 0.2;
  CHECK_THROWS_AS(ap.validate(), std::invalid_argument);
}
