#include "umix/kernels.hpp"

#include <cmath>
#include <limits>
#include <tuple>

#include "umix/likelihood.hpp"

namespace umix::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// count * value with 0 * -inf taken as 0.
double scaled(std::size_t count, double value) {
  return count == 0 ? 0.0 : static_cast<double>(count) * value;
}

bool admissible(const CandidateInterval& c, const ConstraintSpace& space) {
  return space.admits_half_width(c.interval) && space.admits_center(c.center());
}

auto tie_key(const CandidateInterval& c) {
  return std::make_tuple(c.interval.log_half_width(), c.center(), c.run_start, c.run_end);
}

using Pair = std::pair<CandidateInterval, CandidateInterval>;

Pair canonical(const CandidateInterval& a, const CandidateInterval& b) {
  if (std::make_tuple(b.run_start, b.run_end) < std::make_tuple(a.run_start, a.run_end)) {
    return {b, a};
  }
  return {a, b};
}

bool prefer_pair(double loglik_a, const Pair& a, double loglik_b, const Pair& b) {
  if (loglik_a != loglik_b) return loglik_a > loglik_b;
  return std::make_tuple(tie_key(a.first), tie_key(a.second)) <
         std::make_tuple(tie_key(b.first), tie_key(b.second));
}

void merge_pair(PairBest& into, const PairBest& from) {
  into.evaluations += from.evaluations;
  if (!from.pair) return;
  if (!into.pair || prefer_pair(from.loglik, *from.pair, into.loglik, *into.pair)) {
    into.loglik = from.loglik;
    into.pair = from.pair;
    into.weights = from.weights;
  }
}

void merge_profile(ProfileBest& into, const ProfileBest& from) {
  into.evaluations += from.evaluations;
  if (!from.candidate) return;
  if (!into.candidate || prefer(from.loglik, *from.candidate, into.loglik, *into.candidate)) {
    into.loglik = from.loglik;
    into.candidate = from.candidate;
  }
}

}  // namespace

bool prefer(double loglik_a, const CandidateInterval& a, double loglik_b,
            const CandidateInterval& b) {
  if (loglik_a != loglik_b) return loglik_a > loglik_b;
  return tie_key(a) < tie_key(b);
}

ProfileBest profile_scan(const SampleSet& sample, const UniformComponent& background,
                         std::array<double, 2> weights, const ConstraintSpace& space) {
  const std::size_t n = sample.size();
  const double log_bg = weights[0] > 0.0 ? std::log(weights[0]) + background.log_height() : kNegInf;
  const double log_free_weight = weights[1] > 0.0 ? std::log(weights[1]) : kNegInf;

  // covered[k] = number of the first k observations inside the background.
  std::vector<std::size_t> covered(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) {
    covered[k + 1] = covered[k] + (background.contains_closed(sample[k]) ? 1 : 0);
  }
  const std::size_t bg_total = covered[n];
  const std::size_t bare_total = n - bg_total;
  const LogScale c = space.log_c_lower();

  ProfileBest best{kNegInf, std::nullopt, 0};
#pragma omp parallel
  {
    ProfileBest local{kNegInf, std::nullopt, 0};
#pragma omp for schedule(dynamic, 8) nowait
    for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(n); ++si) {
      const auto i = static_cast<std::size_t>(si);
      for (std::size_t j = i; j < n; ++j) {
        const std::optional<CandidateInterval> cand = candidate_for_run(sample, i, j, c);
        if (!cand || !admissible(*cand, space)) continue;
        ++local.evaluations;
        const std::size_t in_bg = covered[j + 1] - covered[i];
        const std::size_t in_bare = (j - i + 1) - in_bg;
        double score = kNegInf;
        if (bare_total == in_bare) {
          const double log_free = log_free_weight + cand->interval.log_height();
          score = scaled(bg_total - in_bg, log_bg) + scaled(in_bg, log_add_exp(log_bg, log_free)) +
                  scaled(in_bare, log_free);
        }
        if (!local.candidate || prefer(score, *cand, local.loglik, *local.candidate)) {
          local.loglik = score;
          local.candidate = cand;
        }
      }
    }
#pragma omp critical(umix_profile_merge)
    merge_profile(best, local);
  }
  return best;
}

ProfileBest profile_scan_serial(const SampleSet& sample, const UniformComponent& background,
                                std::array<double, 2> weights, const ConstraintSpace& space) {
  ProfileBest best{kNegInf, std::nullopt, 0};
  for (const CandidateInterval& cand : candidate_intervals(sample, space.log_c_lower())) {
    if (!admissible(cand, space)) continue;
    ++best.evaluations;
    const MixtureParams params({weights[0], weights[1]}, {background, cand.interval});
    const double score = log_likelihood(params, sample, IntervalConvention::closed).value;
    if (!best.candidate || prefer(score, cand, best.loglik, *best.candidate)) {
      best.loglik = score;
      best.candidate = cand;
    }
  }
  return best;
}

WeightFit score_pair(const CandidateInterval& first, const CandidateInterval& second,
                     std::size_t n, double weight_tol) {
  const std::size_t lo = std::max(first.run_start, second.run_start);
  const std::size_t hi = std::min(first.run_end, second.run_end);
  const std::size_t both = hi >= lo ? hi - lo + 1 : 0;
  const std::size_t covered = first.run_length() + second.run_length() - both;
  if (covered < n) return WeightFit{{}, kNegInf, 0, {}};

  std::vector<CoveragePattern> patterns;
  if (first.run_length() > both) {
    patterns.push_back({0b01, static_cast<double>(first.run_length() - both)});
  }
  if (second.run_length() > both) {
    patterns.push_back({0b10, static_cast<double>(second.run_length() - both)});
  }
  if (both > 0) patterns.push_back({0b11, static_cast<double>(both)});
  const std::array<double, 2> log_heights{first.interval.log_height(),
                                          second.interval.log_height()};
  WeightOptions options;
  options.tol = weight_tol;
  return optimize_pattern_weights(log_heights, patterns, options);
}

PairBest pair_scan(std::span<const CandidateInterval> candidates, std::size_t n,
                   double weight_tol) {
  std::optional<std::size_t> full;
  std::vector<std::size_t> prefixes;
  std::vector<std::size_t> suffixes;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const bool starts = candidates[k].run_start == 0;
    const bool ends = candidates[k].run_end + 1 == n;
    if (starts && ends) {
      full = k;
    } else if (starts) {
      prefixes.push_back(k);
    } else if (ends) {
      suffixes.push_back(k);
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> tuples;
  if (full) {
    for (std::size_t k = 0; k < candidates.size(); ++k) tuples.emplace_back(*full, k);
  }
  for (std::size_t p : prefixes) {
    for (std::size_t s : suffixes) {
      if (candidates[s].run_start <= candidates[p].run_end + 1) tuples.emplace_back(p, s);
    }
  }

  PairBest best{kNegInf, std::nullopt, {}, 0};
#pragma omp parallel
  {
    PairBest local{kNegInf, std::nullopt, {}, 0};
#pragma omp for schedule(dynamic, 32) nowait
    for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(tuples.size()); ++t) {
      const auto& [a, b] = tuples[static_cast<std::size_t>(t)];
      const Pair pair = canonical(candidates[a], candidates[b]);
      WeightFit fit = score_pair(pair.first, pair.second, n, weight_tol);
      ++local.evaluations;
      if (!local.pair || prefer_pair(fit.loglik, pair, local.loglik, *local.pair)) {
        local.loglik = fit.loglik;
        local.pair = pair;
        local.weights = std::move(fit);
      }
    }
#pragma omp critical(umix_pair_merge)
    merge_pair(best, local);
  }
  return best;
}

PairBest pair_scan_serial(std::span<const CandidateInterval> candidates, std::size_t n,
                          double weight_tol) {
  PairBest best{kNegInf, std::nullopt, {}, 0};
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    for (std::size_t b = a; b < candidates.size(); ++b) {
      const Pair pair = canonical(candidates[a], candidates[b]);
      WeightFit fit = score_pair(pair.first, pair.second, n, weight_tol);
      ++best.evaluations;
      if (!best.pair || prefer_pair(fit.loglik, pair, best.loglik, *best.pair)) {
        best.loglik = fit.loglik;
        best.pair = pair;
        best.weights = std::move(fit);
      }
    }
  }
  return best;
}

}  // namespace umix::kernels
