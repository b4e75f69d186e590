#include "umix/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "umix/likelihood.hpp"
#include "umix/sampling.hpp"

namespace umix {

Schedule::Schedule(double c0, double exponent) : c0_(c0), exponent_(exponent) {
  if (!(c0 > 0.0) || !std::isfinite(c0)) {
    throw std::invalid_argument("Schedule: c0 must be positive");
  }
  if (!(exponent > 0.0 && exponent < 1.0)) {
    throw std::invalid_argument("Schedule: exponent d must lie in (0, 1)");
  }
}

LogScale c_n(const Schedule& schedule, std::size_t n) {
  if (n == 0) throw std::invalid_argument("c_n: n must be positive");
  return LogScale{std::log(schedule.c0()) -
                  std::pow(static_cast<double>(n), schedule.exponent())};
}

LogScale c_n_prime(double c0, std::size_t n) {
  if (n == 0) throw std::invalid_argument("c_n_prime: n must be positive");
  if (!(c0 > 0.0)) throw std::invalid_argument("c_n_prime: c0 must be positive");
  return LogScale{std::log(c0) - std::pow(static_cast<double>(n), 0.25)};
}

double log_okamoto_bound(std::size_t n, double delta) {
  if (n == 0) throw std::invalid_argument("okamoto_bound: n must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("okamoto_bound: delta must be positive");
  return -2.0 * static_cast<double>(n) * delta * delta;
}

double okamoto_bound(std::size_t n, double delta) { return std::exp(log_okamoto_bound(n, delta)); }

std::size_t binomial_tail_start(std::size_t n, double p, double delta) {
  const double threshold = static_cast<double>(n) * (p + delta);
  const double k = std::ceil(threshold - 1e-12 * std::max(1.0, threshold));
  if (k <= 0.0) return 0;
  if (k > static_cast<double>(n)) return n + 1;
  return static_cast<std::size_t>(k);
}

namespace {

// Tail as scale * exp(log_scale), with scale in [1, n + 1].
struct ScaledTail {
  long double log_scale;
  long double scale;
};

ScaledTail binomial_tail_scaled(std::size_t n, double p, double delta) {
  if (n == 0) throw std::invalid_argument("binomial_tail_exact: n must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial_tail_exact: p outside [0, 1]");
  if (!(delta > 0.0)) throw std::invalid_argument("binomial_tail_exact: delta must be positive");
  constexpr long double kEmpty = -std::numeric_limits<long double>::infinity();
  const std::size_t start = binomial_tail_start(n, p, delta);
  if (start > n || p == 0.0) return {kEmpty, 0.0L};
  if (p == 1.0) return {0.0L, 1.0L};

  const long double log_p = std::log(static_cast<long double>(p));
  const long double log_q = std::log1p(-static_cast<long double>(p));
  const long double log_n_fact = std::lgamma(static_cast<long double>(n) + 1.0L);
  std::vector<long double> logs;
  logs.reserve(n + 1 - start);
  for (std::size_t k = n + 1; k-- > start;) {
    const auto kl = static_cast<long double>(k);
    const auto rest = static_cast<long double>(n - k);
    logs.push_back(log_n_fact - std::lgamma(kl + 1.0L) - std::lgamma(rest + 1.0L) + kl * log_p +
                   rest * log_q);
  }
  const long double top = *std::max_element(logs.begin(), logs.end());
  // Kahan summation, upper end first.
  long double sum = 0.0L;
  long double carry = 0.0L;
  for (long double lt : logs) {
    const long double y = std::exp(lt - top) - carry;
    const long double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return {top, sum};
}

}  // namespace

double binomial_tail_exact(std::size_t n, double p, double delta) {
  const ScaledTail t = binomial_tail_scaled(n, p, delta);
  if (t.scale == 0.0L) return 0.0;
  return static_cast<double>(std::min(1.0L, t.scale * std::exp(t.log_scale)));
}

double log_binomial_tail_exact(std::size_t n, double p, double delta) {
  const ScaledTail t = binomial_tail_scaled(n, p, delta);
  if (t.scale == 0.0L) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(std::min(0.0L, t.log_scale + std::log(t.scale)));
}

std::size_t Covering::pieces_hit(double lo, double hi) const {
  return static_cast<std::size_t>(std::count_if(pieces.begin(), pieces.end(), [&](const Interval& p) {
    return p.lo < hi && lo < p.hi;
  }));
}

Covering cover_support(const IntervalSet& j0, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("cover_support: c must be positive");
  const double width = 2.0 * c;
  Covering cover{{}, j0, width};
  for (const Interval& source : j0.intervals()) {
    const double ratio = source.length() / width;
    const auto pieces = static_cast<std::size_t>(
        std::max(1.0, std::ceil(ratio - 1e-12 * std::max(1.0, ratio))));
    if (pieces == 1) {
      cover.pieces.push_back({source.lo, source.lo + width});
      continue;
    }
    for (std::size_t k = 0; k + 1 < pieces; ++k) {
      const double lo = source.lo + static_cast<double>(k) * width;
      cover.pieces.push_back({lo, lo + width});
    }
    cover.pieces.push_back({source.hi - width, source.hi});
  }
  return cover;
}

IntervalSet mixture_support(const MixtureParams& params) {
  std::vector<Interval> pieces;
  for (std::size_t m = 0; m < params.size(); ++m) {
    const UniformComponent& c = params.component(m);
    if (params.weight(m) > 0.0 && !c.collapsed()) pieces.push_back({c.lower(), c.upper()});
  }
  return IntervalSet(std::move(pieces));
}

std::size_t densest_window(std::span<const double> sorted, double width, double* window_start) {
  std::size_t best = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    j = std::max(j, i);
    while (j < sorted.size() && sorted[j] < sorted[i] + width) ++j;
    if (j - i > best) {
      best = j - i;
      if (window_start != nullptr) *window_start = sorted[i];
    }
  }
  return best;
}

namespace {

MixtureParams random_small_theta(const MixtureParams& truth, double c0, const SupportBounds& box,
                                 RandomStream& stream) {
  const std::size_t M = truth.size();
  const std::size_t small = 1 + static_cast<std::size_t>(stream.below(M));
  std::vector<double> weights(M);
  double total = 0.0;
  for (double& w : weights) {
    w = 0.05 + stream.uniform01();
    total += w;
  }
  for (double& w : weights) w /= total;
  std::vector<UniformComponent> comps;
  for (std::size_t m = 0; m < M; ++m) {
    const double center = stream.uniform(box.l_min, box.l_max);
    double b;
    if (m < small) {
      // Log-uniform in [1e-3 c0, c0].
      b = c0 * std::exp(std::log(1e-3) * stream.uniform01());
    } else {
      b = stream.uniform(std::min(c0, box.length), box.length);
      b = std::max(b, std::nextafter(c0, 2.0 * c0));
    }
    comps.emplace_back(center, b);
  }
  return MixtureParams(std::move(weights), std::move(comps));
}

}  // namespace

BoundedRjReport verify_bounded_rj(const MixtureParams& truth, double c0, std::size_t n,
                                  std::size_t trials, std::uint64_t seed) {
  if (!(c0 > 0.0)) throw std::invalid_argument("verify_bounded_rj: c0 must be positive");
  const SampleSet sample = draw_sample(truth, n, seed);
  const SupportBounds box = support_bounds(truth);
  const std::vector<double> heights = sorted_heights(to_piecewise(truth));

  BoundedRjReport report;
  report.max_height = heights.back();
  report.bound = 3.0 * static_cast<double>(truth.size()) * report.max_height * 2.0 * c0;
  report.n = n;
  report.c0 = c0;
  report.trials = trials;
  report.seed = seed;

  std::size_t random_best = 0;
#pragma omp parallel for schedule(static) reduction(max : random_best)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(trials); ++t) {
    RandomStream stream(seed, 1 + static_cast<std::uint64_t>(t));
    const MixtureParams theta = random_small_theta(truth, c0, box, stream);
    random_best = std::max(random_best, count_in(small_support(theta, c0), sample));
  }
  report.random_sup = static_cast<double>(random_best) / static_cast<double>(n);

  // Greedy: M windows of width 2 c0, each on the densest remaining stretch.
  std::vector<double> remaining(sample.values().begin(), sample.values().end());
  std::size_t greedy = 0;
  for (std::size_t m = 0; m < truth.size() && !remaining.empty(); ++m) {
    double start = remaining.front();
    const std::size_t count = densest_window(remaining, 2.0 * c0, &start);
    greedy += count;
    std::erase_if(remaining, [&](double x) { return start <= x && x < start + 2.0 * c0; });
  }
  report.greedy_sup = static_cast<double>(greedy) / static_cast<double>(n);
  report.empirical_sup = std::max(report.random_sup, report.greedy_sup);
  return report;
}

}  // namespace umix
