#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "umix/core_model.hpp"
#include "umix/sampling.hpp"

using namespace umix;

namespace {

MixtureParams reference_truth() {
  return MixtureParams({0.6, 0.4}, {UniformComponent(0.5, 0.5), UniformComponent(0.6, 0.2)});
}

double piecewise_cdf(const PiecewiseDensity& p, double x) {
  double acc = 0.0;
  for (std::size_t t = 0; t < p.heights().size(); ++t) {
    const Interval iv = p.interval(t);
    if (x <= iv.lo) break;
    acc += p.heights()[t] * (std::min(x, iv.hi) - iv.lo);
  }
  return acc;
}

double ks_statistic(const SampleSet& s, const PiecewiseDensity& p) {
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = piecewise_cdf(p, s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace

TEST_CASE("draws stay inside the support") {
  const MixtureParams theta = reference_truth();
  const SampleSet s = draw_sample(theta, 1000, 42);
  CHECK(s.size() == 1000);
  CHECK(std::is_sorted(s.values().begin(), s.values().end()));
  CHECK(s[0] >= 0.0);
  CHECK(s[999] < 1.0);
  CHECK(s.seed() == 42);
  REQUIRE(s.source());
  CHECK(*s.source() == theta);

  const MixtureParams far({0.5, 0.5}, {UniformComponent(-3.0, 0.25), UniformComponent(7.0, 1e-3)});
  const SupportBounds b = support_bounds(far);
  for (double x : draw_sample(far, 1000, 1).values()) {
    CHECK(x >= b.l_min);
    CHECK(x < b.l_max);
  }
}

TEST_CASE("uniform mean and component mass") {
  const SampleSet u = draw_sample(MixtureParams::single(UniformComponent(0.5, 0.5)), 100000, 7);
  double mean = 0.0;
  for (double x : u.values()) mean += x;
  mean /= static_cast<double>(u.size());
  CHECK(std::abs(mean - 0.5) < 0.005);

  const SampleSet s = draw_sample(reference_truth(), 100000, 9);
  const auto lo = std::lower_bound(s.values().begin(), s.values().end(), 0.4);
  const auto hi = std::lower_bound(s.values().begin(), s.values().end(), 0.8);
  const double frac = static_cast<double>(hi - lo) / static_cast<double>(s.size());
  CHECK(std::abs(frac - 0.64) < 0.005);
}

TEST_CASE("determinism and stream independence") {
  const MixtureParams theta = reference_truth();
  const SampleSet a = draw_sample(theta, 500, 123);
  const SampleSet b = draw_sample(theta, 500, 123);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  const SampleSet c = draw_sample(theta, 500, 124);
  CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));

  std::set<std::uint64_t> firsts;
  for (std::uint64_t stream = 0; stream < 64; ++stream) {
    firsts.insert(RandomStream(1, stream).next_u64());
  }
  CHECK(firsts.size() == 64);
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}

TEST_CASE("zero-weight components are never drawn") {
  const MixtureParams theta({0.0, 1.0}, {UniformComponent(-5.0, 0.5), UniformComponent(0.5, 0.5)});
  for (double x : draw_sample(theta, 2000, 3).values()) CHECK(x >= 0.0);
  const MixtureParams last_zero({1.0, 0.0}, {UniformComponent(0.5, 0.5), UniformComponent(9.0, 0.5)});
  for (double x : draw_sample(last_zero, 2000, 3).values()) CHECK(x < 1.0);
}

TEST_CASE("Kolmogorov-Smirnov against the true step CDF") {
  const MixtureParams theta = reference_truth();
  const PiecewiseDensity p = to_piecewise(theta);
  const std::size_t n = 10000;
  // Each seed fails at the 99% level with probability about 0.01.
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    if (ks_statistic(draw_sample(theta, n, seed), p) >= 1.63 / std::sqrt(static_cast<double>(n))) {
      ++failures;
    }
  }
  CHECK(failures <= 2);
}

TEST_CASE("RandomStream ranges") {
  RandomStream rng(99);
  for (int k = 0; k < 10000; ++k) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rng.uniform(2.0, 2.0 + 1e-15);
    CHECK(v >= 2.0);
    CHECK(v < 2.0 + 1e-15);
    CHECK(rng.below(7) < 7);
  }
  CHECK_THROWS_AS(rng.below(0), std::invalid_argument);
}

TEST_CASE("invalid samples") {
  CHECK_THROWS_AS(draw_sample(reference_truth(), 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(SampleSet({}, 0), std::invalid_argument);
  CHECK_THROWS_AS(SampleSet({0.1, INFINITY}, 0), std::invalid_argument);
  const SampleSet s({0.3, 0.1, 0.2}, 0);
  CHECK(s[0] == 0.1);
  CHECK(s[2] == 0.3);
}
