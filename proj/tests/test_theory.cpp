#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "oracles.hpp"
#include "umix/likelihood.hpp"
#include "umix/sampling.hpp"
#include "umix/theory.hpp"

using namespace umix;

namespace {

MixtureParams reference_truth() {
  return MixtureParams({0.6, 0.4}, {UniformComponent(0.5, 0.5), UniformComponent(0.6, 0.2)});
}

}  // namespace

TEST_CASE("schedules") {
  const Schedule s(1.0, 0.93);
  CHECK(c_n(s, 10).value == doctest::Approx(-8.5113804).epsilon(1e-7));
  CHECK(c_n(Schedule(1.0, 0.3), 1).value == -1.0);
  CHECK(c_n(s, 1000).value == doctest::Approx(-616.595).epsilon(1e-5));
  CHECK(spike_competitor_loglik(1.0, 0.4, c_n(s, 1000), 1000) == doctest::Approx(104.7).epsilon(5e-4));
  CHECK(c_n(s, 5000).underflows());

  CHECK(c_n_prime(1.0, 16).value == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(c_n_prime(0.1, 1).value == doctest::Approx(std::log(0.1) - 1.0));
  CHECK(c_n_prime(1.0, 10000).value == doctest::Approx(-10.0).epsilon(1e-15));

  for (std::size_t n = 1; n < 3000; ++n) {
    CHECK(c_n(s, n + 1).value < c_n(s, n).value);
    CHECK(c_n_prime(1.0, n).value >= c_n(s, n).value);
  }
  CHECK_THROWS_AS(Schedule(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(Schedule(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Schedule(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("okamoto_bound") {
  CHECK(okamoto_bound(100, 0.1) == doctest::Approx(0.13533528323661269).epsilon(1e-15));
  CHECK(okamoto_bound(1, 0.5) == doctest::Approx(0.6065306597126334).epsilon(1e-15));
  double previous = 1.0;
  for (double d = 0.01; d < 2.5; d += 0.01) {
    const double b = okamoto_bound(50, d);
    CHECK(b < previous);
    previous = b;
  }
}

TEST_CASE("binomial tail against frozen high-precision values") {
  struct Row {
    std::size_t n;
    double p, delta, tail;
  };
  // Reference sums at 50 digits.
  const Row rows[] = {
      {100, 0.5, 0.1, 0.028443966820490395835},
      {1000, 0.1, 0.01, 0.15825753018870207006},
      {1000, 0.7, 0.05, 0.00025980303652893069016},
      {10000, 0.5, 0.01, 0.02329276385247369439},
      {100, 0.9, 0.05, 0.057576886487033808238},
  };
  for (const Row& r : rows) {
    CHECK(std::abs(binomial_tail_exact(r.n, r.p, r.delta) - r.tail) < 1e-12);
  }
}

TEST_CASE("binomial tail against an incomplete-beta oracle") {
  for (std::size_t n : {10u, 100u, 1000u, 10000u}) {
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      for (double delta : {0.01, 0.05, 0.1, 0.2}) {
        const std::size_t k = binomial_tail_start(n, p, delta);
        const double expected = oracle::binomial_upper_tail(n, p, k);
        CHECK(std::abs(binomial_tail_exact(n, p, delta) - expected) < 1e-12);
      }
    }
  }
}

TEST_CASE("log tail where the tail underflows") {
  // P(Z >= 7000), Z ~ Bin(10^4, 0.5): log tail about -1645.
  const double lt = log_binomial_tail_exact(10000, 0.5, 0.2);
  CHECK(binomial_tail_exact(10000, 0.5, 0.2) == 0.0);
  CHECK(std::isfinite(lt));
  CHECK(lt < log_okamoto_bound(10000, 0.2));
  CHECK(log_okamoto_bound(10000, 0.2) == doctest::Approx(-800.0));
  for (std::size_t n : {10u, 100u, 1000u}) {
    for (double p : {0.1, 0.5, 0.9}) {
      const double t = binomial_tail_exact(n, p, 0.05);
      if (t > 0.0) CHECK(log_binomial_tail_exact(n, p, 0.05) == doctest::Approx(std::log(t)).epsilon(1e-13));
    }
  }
  CHECK(log_binomial_tail_exact(10, 0.3, 0.8) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("binomial tail boundary cases") {
  CHECK(binomial_tail_start(100, 0.5, 0.1) == 60);
  CHECK(binomial_tail_start(10, 0.3, 0.2) == 5);
  CHECK(binomial_tail_start(10, 0.7, 0.3) == 10);
  CHECK(binomial_tail_exact(10, 0.3, 0.7) == doctest::Approx(std::pow(0.3, 10)).epsilon(1e-12));
  CHECK(binomial_tail_exact(10, 0.3, 0.8) == 0.0);
  CHECK(binomial_tail_exact(10, 0.0, 0.1) == 0.0);
  CHECK(binomial_tail_exact(10, 1.0, 1e-3) == 0.0);
  CHECK(binomial_tail_exact(10, 0.3, 0.2) == doctest::Approx(0.1502683326).epsilon(1e-9));
  CHECK_THROWS_AS(binomial_tail_exact(10, 1.5, 0.1), std::invalid_argument);
}

TEST_CASE("Okamoto holds strictly on the grid") {
  for (std::size_t n : {10u, 100u, 1000u, 10000u}) {
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      for (double delta : {0.01, 0.05, 0.1, 0.2}) {
        if (static_cast<double>(n) * delta < 1.0) continue;
        CHECK(log_binomial_tail_exact(n, p, delta) < log_okamoto_bound(n, delta));
        CHECK(binomial_tail_exact(n, p, delta) <= okamoto_bound(n, delta));
      }
    }
  }
}

TEST_CASE("cover_support examples") {
  Covering cv = cover_support(IntervalSet({{0.0, 1.0}}), 0.3);
  REQUIRE(cv.count() == 2);
  CHECK(cv.pieces[0].lo == 0.0);
  CHECK(cv.pieces[0].hi == doctest::Approx(0.6));
  CHECK(cv.pieces[1].lo == doctest::Approx(0.4));
  CHECK(cv.pieces[1].hi == 1.0);

  cv = cover_support(IntervalSet({{0.0, 1.0}}), 0.5);
  REQUIRE(cv.count() == 1);
  CHECK(cv.pieces[0].lo == 0.0);
  CHECK(cv.pieces[0].hi == 1.0);

  cv = cover_support(IntervalSet({{0.0, 0.4}, {0.8, 1.0}}), 0.1);
  CHECK(cv.count() == 3);
  CHECK(static_cast<double>(cv.count()) <= 0.6 / 0.2 + 2);

  cv = cover_support(IntervalSet({{0.0, 0.1}}), 5.0);
  CHECK(cv.count() == 1);
  CHECK_THROWS_AS(cover_support(IntervalSet({{0.0, 1.0}}), 0.0), std::invalid_argument);
}

TEST_CASE("covering count, coverage and hit bounds") {
  RandomStream rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t M = 1 + rng.below(4);
    std::vector<Interval> parts;
    for (std::size_t m = 0; m < M; ++m) {
      const double a = rng.uniform(0.0, 10.0);
      parts.push_back({a, a + rng.uniform(0.01, 3.0)});
    }
    const IntervalSet j0(parts);
    const double c = std::exp(rng.uniform(-4.0, 1.0));
    const Covering cv = cover_support(j0, c);
    const double span = j0.intervals().back().hi - j0.intervals().front().lo;
    CHECK(static_cast<double>(cv.count()) <= span / (2.0 * c) + static_cast<double>(j0.size()));
    for (const Interval& p : cv.pieces) CHECK(p.length() == doctest::Approx(2.0 * c));

    for (int k = 0; k < 100; ++k) {
      const Interval& src = j0.intervals()[rng.below(j0.size())];
      const double x = rng.uniform(src.lo, src.hi);
      bool covered = false;
      for (const Interval& p : cv.pieces) covered = covered || p.contains(x);
      CHECK(covered);

      if (src.length() >= 2.0 * c) {
        const double lo = rng.uniform(src.lo, src.hi - 2.0 * c);
        CHECK(cv.pieces_hit(lo, lo + 2.0 * c) <= 3);
      }
    }
  }
}

TEST_CASE("mixture_support") {
  const IntervalSet s = mixture_support(reference_truth());
  REQUIRE(s.size() == 1);
  CHECK(s.intervals()[0].lo == 0.0);
  CHECK(s.intervals()[0].hi == 1.0);
  const IntervalSet two = mixture_support(
      MixtureParams({0.5, 0.5}, {UniformComponent(0.5, 0.5), UniformComponent(3.0, 0.5)}));
  CHECK(two.size() == 2);
}

TEST_CASE("densest_window") {
  const std::vector<double> xs{0.0, 0.1, 0.15, 0.2, 0.9, 1.0};
  double start = -1.0;
  CHECK(densest_window(xs, 0.21, &start) == 4);
  CHECK(start == 0.0);
  CHECK(densest_window(xs, 0.2, nullptr) == 3);
  CHECK(densest_window(std::vector<double>{}, 1.0, nullptr) == 0);
}

TEST_CASE("bounded R_n verifier") {
  const BoundedRjReport r = verify_bounded_rj(reference_truth(), 0.01, 10000, 2000, 5);
  CHECK(r.bound == doctest::Approx(0.192));
  CHECK(r.max_height == doctest::Approx(1.6));
  CHECK(r.empirical_sup < r.bound);
  CHECK(r.empirical_sup >= r.greedy_sup);
  // Two windows of width 0.02 inside the tall part hold about 2 * 1.6 * 0.02.
  CHECK(r.greedy_sup > 0.05);
  CHECK(r.greedy_sup < 0.09);

  const BoundedRjReport u = verify_bounded_rj(MixtureParams::single(UniformComponent(0.5, 0.5)), 0.05, 10000, 500, 6);
  CHECK(u.bound == doctest::Approx(0.3));
  CHECK(u.empirical_sup < u.bound);
  CHECK(std::abs(u.greedy_sup - 0.1) < 0.02);

  const BoundedRjReport tiny = verify_bounded_rj(reference_truth(), 1e-9, 1000, 200, 7);
  CHECK(tiny.empirical_sup <= 2.0 / 1000.0);

  const BoundedRjReport again = verify_bounded_rj(reference_truth(), 0.01, 10000, 2000, 5);
  CHECK(again.empirical_sup == r.empirical_sup);
  CHECK(again.random_sup == r.random_sup);
}
