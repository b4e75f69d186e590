#include "umix/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "umix/kernels.hpp"

namespace umix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -kInf;
constexpr int kMaxNudges = 64;

using Run = std::pair<std::size_t, std::size_t>;

double log_sum_exp_masked(std::span<const double> terms, std::uint64_t mask) {
  double hi = kNegInf;
  for (std::size_t m = 0; m < terms.size(); ++m) {
    if ((mask >> m) & 1U) hi = std::max(hi, terms[m]);
  }
  if (hi == kNegInf) return kNegInf;
  double sum = 0.0;
  for (std::size_t m = 0; m < terms.size(); ++m) {
    if ((mask >> m) & 1U) sum += std::exp(terms[m] - hi);
  }
  return hi + std::log(sum);
}

std::vector<double> normalized(std::vector<double> w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return w;
}

bool admissible(const CandidateInterval& c, const ConstraintSpace& space) {
  return space.admits_half_width(c.interval) && space.admits_center(c.center());
}

std::vector<CandidateInterval> admissible_candidates(const SampleSet& sample,
                                                     const ConstraintSpace& space) {
  std::vector<CandidateInterval> out;
  for (CandidateInterval& c : candidate_intervals(sample, space.log_c_lower())) {
    if (admissible(c, space)) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::optional<CandidateInterval> candidate_for_run(const SampleSet& sample, std::size_t run_start,
                                                   std::size_t run_end, LogScale c_lower) {
  const std::size_t n = sample.size();
  if (run_start > run_end || run_end >= n) {
    throw std::invalid_argument("candidate_for_run: invalid run");
  }
  const double first = sample[run_start];
  const double last = sample[run_end];
  const bool has_left = run_start > 0;
  const bool has_right = run_end + 1 < n;
  const double left = has_left ? sample[run_start - 1] : kNegInf;
  const double right = has_right ? sample[run_end + 1] : kInf;
  // Tied observations cannot be split between inside and outside.
  if ((has_left && left == first) || (has_right && right == last)) return std::nullopt;

  auto holds_exactly = [&](const UniformComponent& u) {
    return u.contains_closed(first) && u.contains_closed(last) &&
           !(has_left && u.contains_closed(left)) && !(has_right && u.contains_closed(right));
  };
  auto make = [&](const UniformComponent& u) -> std::optional<CandidateInterval> {
    if (!holds_exactly(u)) return std::nullopt;
    return CandidateInterval{run_start, run_end, u};
  };

  const double span = last - first;
  const double mid = first + 0.5 * span;
  if (span > 0.0 && std::log(0.5 * span) >= c_lower.value) {
    // Tight span; widen by ulps if rounding of mid +- b misses an end.
    double b = 0.5 * span;
    for (int k = 0; k < kMaxNudges && !(mid - b <= first && mid + b >= last); ++k) {
      b = std::nextafter(b, kInf);
    }
    return make(UniformComponent(mid, b));
  }

  // Forced half-width c_lower: centered on the run, shifted the least
  // amount needed to drop a captured neighbour.
  const UniformComponent centered = UniformComponent::with_log_half_width(mid, c_lower.value);
  if (holds_exactly(centered)) return CandidateInterval{run_start, run_end, centered};
  if (centered.collapsed()) return std::nullopt;

  const bool left_hit = has_left && centered.contains_closed(left);
  const bool right_hit = has_right && centered.contains_closed(right);
  if (left_hit == right_hit) return std::nullopt;
  const double b = centered.half_width();
  double center = left_hit ? left + b : right - b;
  for (int k = 0; k < kMaxNudges; ++k) {
    if (left_hit && center - b > left) break;
    if (right_hit && center + b < right) break;
    center = std::nextafter(center, left_hit ? kInf : kNegInf);
  }
  return make(UniformComponent::with_log_half_width(center, c_lower.value));
}

std::vector<CandidateInterval> candidate_intervals(const SampleSet& sample, LogScale c_lower) {
  std::vector<CandidateInterval> out;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t j = i; j < sample.size(); ++j) {
      if (auto c = candidate_for_run(sample, i, j, c_lower)) out.push_back(std::move(*c));
    }
  }
  return out;
}

std::vector<CandidateInterval> candidate_intervals(const SampleSet& sample, double c_lower) {
  return candidate_intervals(sample, LogScale::of(c_lower));
}

WeightFit optimize_pattern_weights(std::span<const double> log_heights,
                                   std::span<const CoveragePattern> patterns,
                                   const WeightOptions& options) {
  const std::size_t M = log_heights.size();
  if (M == 0 || M > 64) throw std::invalid_argument("optimize_weights: need 1..64 supports");
  if (!(options.tol > 0.0)) throw std::invalid_argument("optimize_weights: tol must be positive");
  double total = 0.0;
  for (const CoveragePattern& p : patterns) {
    if (p.count > 0.0 && p.mask == 0) {
      throw UncoveredPointError("optimize_weights: an observation lies in no support");
    }
    total += p.count;
  }
  if (!(total > 0.0)) throw std::invalid_argument("optimize_weights: no observations");

  WeightFit fit;
  std::vector<double> alpha(M, 1.0 / static_cast<double>(M));
  std::vector<double> next(M);
  std::vector<double> terms(M);
  double previous = kNegInf;
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    for (std::size_t m = 0; m < M; ++m) {
      terms[m] = alpha[m] > 0.0 ? std::log(alpha[m]) + log_heights[m] : kNegInf;
    }
    // One pass yields the loglik of alpha and the responsibilities for the
    // next iterate.
    double loglik = 0.0;
    std::fill(next.begin(), next.end(), 0.0);
    for (const CoveragePattern& p : patterns) {
      if (p.count == 0.0) continue;
      const double lse = log_sum_exp_masked(terms, p.mask);
      loglik += p.count * lse;
      for (std::size_t m = 0; m < M; ++m) {
        if ((p.mask >> m) & 1U) next[m] += p.count * std::exp(terms[m] - lse);
      }
    }
    fit.iterations = it;
    if (options.record_trace) fit.trace.push_back(loglik);
    const bool done = !(loglik - previous >= options.tol);
    fit.loglik = loglik;
    fit.weights = alpha;
    if (done || loglik == kNegInf) break;
    previous = loglik;
    for (std::size_t m = 0; m < M; ++m) alpha[m] = next[m] / total;
  }
  fit.weights = normalized(std::move(fit.weights));
  return fit;
}

WeightFit optimize_weights(const SampleSet& sample, std::span<const UniformComponent> supports,
                           const WeightOptions& options) {
  const std::size_t M = supports.size();
  if (M == 0 || M > 64) throw std::invalid_argument("optimize_weights: need 1..64 supports");
  std::map<std::uint64_t, double> grouped;
  for (double x : sample.values()) {
    std::uint64_t mask = 0;
    for (std::size_t m = 0; m < M; ++m) {
      const bool in = options.convention == IntervalConvention::half_open
                          ? supports[m].contains(x)
                          : supports[m].contains_closed(x);
      if (in) mask |= std::uint64_t{1} << m;
    }
    grouped[mask] += 1.0;
  }
  std::vector<CoveragePattern> patterns;
  for (const auto& [mask, count] : grouped) patterns.push_back({mask, count});
  std::vector<double> log_heights;
  for (const UniformComponent& s : supports) log_heights.push_back(s.log_height());
  return optimize_pattern_weights(log_heights, patterns, options);
}

WeightFit optimize_weights(const SampleSet& sample, std::span<const UniformComponent> supports,
                           double tol) {
  WeightOptions options;
  options.tol = tol;
  return optimize_weights(sample, supports, options);
}

std::string to_string(FitMode mode) {
  switch (mode) {
    case FitMode::exact:
      return "exact";
    case FitMode::multistart:
      return "multistart";
    case FitMode::profile:
      return "profile";
  }
  return "unknown";
}

FitResult mle_profile_single(const SampleSet& sample, const UniformComponent& background,
                             std::array<double, 2> weights, const ConstraintSpace& space) {
  if (!(weights[0] >= 0.0 && weights[1] >= 0.0) ||
      std::abs(weights[0] + weights[1] - 1.0) > MixtureParams::kWeightSumTolerance) {
    throw std::invalid_argument("mle_profile_single: weights must be nonnegative and sum to 1");
  }
  const kernels::ProfileBest best = kernels::profile_scan(sample, background, weights, space);
  if (!best.candidate) {
    throw std::runtime_error("mle_profile_single: no admissible candidate interval");
  }
  return FitResult{MixtureParams({weights[0], weights[1]}, {background, best.candidate->interval}),
                   best.loglik,
                   FitMode::profile,
                   best.evaluations,
                   space,
                   {{best.candidate->run_start, best.candidate->run_end}}};
}

FitResult mle_exact(const SampleSet& sample, std::size_t components, const ConstraintSpace& space,
                    double weight_tol, const ExactOptions& options) {
  if (components != 1 && components != 2) {
    throw UnsupportedError("mle_exact: exhaustive search supports M = 1 or 2, got M = " +
                           std::to_string(components) + "; use mle_multistart");
  }
  if (components == 2 && sample.size() > options.max_n) {
    throw InstanceTooLargeError("mle_exact: n = " + std::to_string(sample.size()) +
                                " exceeds the exhaustive-search cap of " +
                                std::to_string(options.max_n) + "; use mle_multistart");
  }
  if (!(weight_tol > 0.0)) throw std::invalid_argument("mle_exact: weight_tol must be positive");

  const std::vector<CandidateInterval> candidates = admissible_candidates(sample, space);
  if (candidates.empty()) throw std::runtime_error("mle_exact: no admissible candidate interval");
  const std::size_t n = sample.size();

  if (components == 1) {
    std::optional<CandidateInterval> best;
    double best_loglik = kNegInf;
    for (const CandidateInterval& c : candidates) {
      const double score = c.run_length() == n
                               ? static_cast<double>(n) * c.interval.log_height()
                               : kNegInf;
      if (!best || kernels::prefer(score, c, best_loglik, *best)) {
        best = c;
        best_loglik = score;
      }
    }
    return FitResult{MixtureParams::single(best->interval), best_loglik, FitMode::exact,
                     candidates.size(), space, {{best->run_start, best->run_end}}};
  }

  const kernels::PairBest best = kernels::pair_scan(candidates, n, weight_tol);
  if (!best.pair || best.loglik == kNegInf) {
    const CandidateInterval& a = candidates.front();
    return FitResult{MixtureParams({0.5, 0.5}, {a.interval, a.interval}), kNegInf,
                     FitMode::exact, best.evaluations, space,
                     {{a.run_start, a.run_end}, {a.run_start, a.run_end}}};
  }
  const auto& [first, second] = *best.pair;
  return FitResult{MixtureParams(best.weights.weights, {first.interval, second.interval}),
                   best.loglik,
                   FitMode::exact,
                   best.evaluations,
                   space,
                   {{first.run_start, first.run_end}, {second.run_start, second.run_end}}};
}

WeightFit score_runs(const SampleSet& sample, std::span<const Run> runs,
                     const ConstraintSpace& space, double weight_tol) {
  const std::size_t M = runs.size();
  if (M == 0 || M > 64) throw std::invalid_argument("score_runs: need 1..64 runs");
  std::vector<double> log_heights;
  for (const auto& [i, j] : runs) {
    if (i > j || j >= sample.size()) return WeightFit{{}, kNegInf, 0, {}};
    const auto cand = candidate_for_run(sample, i, j, space.log_c_lower());
    if (!cand || !admissible(*cand, space)) return WeightFit{{}, kNegInf, 0, {}};
    log_heights.push_back(cand->interval.log_height());
  }
  std::map<std::uint64_t, double> grouped;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    std::uint64_t mask = 0;
    for (std::size_t m = 0; m < M; ++m) {
      if (runs[m].first <= k && k <= runs[m].second) mask |= std::uint64_t{1} << m;
    }
    if (mask == 0) return WeightFit{{}, kNegInf, 0, {}};
    grouped[mask] += 1.0;
  }
  std::vector<CoveragePattern> patterns;
  for (const auto& [mask, count] : grouped) patterns.push_back({mask, count});
  WeightOptions options;
  options.tol = weight_tol;
  return optimize_pattern_weights(log_heights, patterns, options);
}

namespace {

FitResult fit_from_runs(const SampleSet& sample, const std::vector<Run>& runs, WeightFit fit,
                        const ConstraintSpace& space, std::size_t evaluations) {
  std::vector<UniformComponent> comps;
  for (const auto& [i, j] : runs) {
    comps.push_back(candidate_for_run(sample, i, j, space.log_c_lower())->interval);
  }
  std::vector<double> weights = fit.weights.empty()
                                    ? std::vector<double>(runs.size(), 1.0 / runs.size())
                                    : fit.weights;
  return FitResult{MixtureParams(normalized(std::move(weights)), std::move(comps)), fit.loglik,
                   FitMode::multistart, evaluations, space, runs};
}

struct ClimbResult {
  std::vector<Run> runs;
  WeightFit fit;
  std::size_t evaluations = 0;
};

ClimbResult climb(const SampleSet& sample, std::vector<Run> runs, const ConstraintSpace& space,
                  double weight_tol) {
  constexpr double kMinGain = 1e-12;
  constexpr std::size_t kMaxSteps = 1000000;
  const auto n = static_cast<long long>(sample.size());
  // Grow, shrink or shift one run by 1, 2, 4, ... observations.
  std::vector<std::pair<long long, long long>> moves;
  for (long long step = 1; step < n; step *= 2) {
    for (const auto& [di, dj] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}, {-1, -1}, {1, 1}}) {
      moves.emplace_back(di * step, dj * step);
    }
  }

  ClimbResult state{runs, score_runs(sample, runs, space, weight_tol), 1};
  for (std::size_t step = 0; step < kMaxSteps; ++step) {
    std::optional<std::vector<Run>> best_runs;
    WeightFit best_fit;
    double best_loglik = state.fit.loglik;
    for (std::size_t m = 0; m < state.runs.size(); ++m) {
      for (const auto& [di, dj] : moves) {
        const long long i = static_cast<long long>(state.runs[m].first) + di;
        const long long j = static_cast<long long>(state.runs[m].second) + dj;
        if (i < 0 || j >= n || i > j) continue;
        std::vector<Run> trial = state.runs;
        trial[m] = {static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
        WeightFit fit = score_runs(sample, trial, space, weight_tol);
        ++state.evaluations;
        const bool improves = best_loglik == kNegInf ? fit.loglik > kNegInf
                                                     : fit.loglik > best_loglik + kMinGain;
        if (improves) {
          best_loglik = fit.loglik;
          best_runs = std::move(trial);
          best_fit = std::move(fit);
        }
      }
    }
    if (!best_runs) break;
    state.runs = std::move(*best_runs);
    state.fit = std::move(best_fit);
  }
  return state;
}

std::vector<Run> random_runs(std::size_t n, std::size_t M, RandomStream& stream) {
  std::vector<Run> runs;
  for (std::size_t m = 0; m < M; ++m) {
    std::size_t i = static_cast<std::size_t>(stream.below(n));
    std::size_t j = static_cast<std::size_t>(stream.below(n));
    if (i > j) std::swap(i, j);
    runs.emplace_back(i, j);
  }
  return runs;
}

// Starts cycle through three shapes: a contiguous partition, one run over
// everything with the rest random (nested optima), and independent random
// runs.
std::vector<Run> random_start(const SampleSet& sample, std::size_t M, std::size_t restart,
                              RandomStream& stream) {
  const std::size_t n = sample.size();
  if (M == 1 || n < M) return std::vector<Run>(M, Run{0, n - 1});
  switch (restart % 3) {
    case 1: {
      std::vector<Run> runs = random_runs(n, M, stream);
      runs[stream.below(M)] = Run{0, n - 1};
      return runs;
    }
    case 2:
      return random_runs(n, M, stream);
    default:
      break;
  }
  // M - 1 distinct cut points in 1..n-1 give M contiguous blocks.
  std::vector<std::size_t> cuts;
  while (cuts.size() < M - 1) {
    const std::size_t cut = 1 + static_cast<std::size_t>(stream.below(n - 1));
    if (std::find(cuts.begin(), cuts.end(), cut) == cuts.end()) cuts.push_back(cut);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<Run> runs;
  std::size_t start = 0;
  for (std::size_t cut : cuts) {
    runs.emplace_back(start, cut - 1);
    start = cut;
  }
  runs.emplace_back(start, n - 1);
  return runs;
}

}  // namespace

FitResult local_search(const SampleSet& sample, std::vector<Run> runs,
                       const ConstraintSpace& space, double weight_tol) {
  ClimbResult result = climb(sample, std::move(runs), space, weight_tol);
  return fit_from_runs(sample, result.runs, std::move(result.fit), space, result.evaluations);
}

FitResult mle_multistart(const SampleSet& sample, std::size_t components,
                         const ConstraintSpace& space, std::size_t restarts, std::uint64_t seed,
                         double weight_tol) {
  if (restarts == 0) throw std::invalid_argument("mle_multistart: restarts must be positive");
  if (components == 0 || components > 64) {
    throw UnsupportedError("mle_multistart: M must lie in 1..64");
  }
  constexpr int kStartAttempts = 100;
  std::optional<ClimbResult> best;
  std::size_t evaluations = 0;
  for (std::size_t r = 0; r < restarts; ++r) {
    RandomStream stream(seed, r);
    std::vector<Run> start = random_start(sample, components, r, stream);
    for (int attempt = 1; attempt < kStartAttempts; ++attempt) {
      if (score_runs(sample, start, space, weight_tol).loglik > kNegInf) break;
      start = random_start(sample, components, r, stream);
    }
    ClimbResult result = climb(sample, std::move(start), space, weight_tol);
    evaluations += result.evaluations;
    if (!best || result.fit.loglik > best->fit.loglik) best = std::move(result);
  }
  return fit_from_runs(sample, best->runs, std::move(best->fit), space, evaluations);
}

double density_l1_distance(const PiecewiseDensity& p, const PiecewiseDensity& q) {
  std::vector<double> points = p.breakpoints();
  points.insert(points.end(), q.breakpoints().begin(), q.breakpoints().end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < points.size(); ++t) {
    total += std::abs(p.at(points[t]) - q.at(points[t])) * (points[t + 1] - points[t]);
  }
  return total;
}

namespace {

double regular_density(const MixtureParams& params, double x) {
  double sum = 0.0;
  for (std::size_t m = 0; m < params.size(); ++m) {
    const UniformComponent& c = params.component(m);
    if (params.weight(m) > 0.0 && !c.collapsed() && c.contains(x)) {
      sum += params.weight(m) / (2.0 * c.half_width());
    }
  }
  return sum;
}

}  // namespace

double mixture_l1_distance(const MixtureParams& p, const MixtureParams& q) {
  std::vector<double> points;
  std::map<double, std::pair<double, double>> atoms;
  auto collect = [&](const MixtureParams& params, bool is_p) {
    for (std::size_t m = 0; m < params.size(); ++m) {
      const UniformComponent& c = params.component(m);
      if (params.weight(m) <= 0.0) continue;
      if (c.collapsed()) {
        auto& slot = atoms[c.center()];
        (is_p ? slot.first : slot.second) += params.weight(m);
      } else {
        points.push_back(c.lower());
        points.push_back(c.upper());
      }
    }
  };
  collect(p, true);
  collect(q, false);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < points.size(); ++t) {
    total += std::abs(regular_density(p, points[t]) - regular_density(q, points[t])) *
             (points[t + 1] - points[t]);
  }
  for (const auto& [where, mass] : atoms) total += std::abs(mass.first - mass.second);
  return total;
}

double param_distance(const MixtureParams& estimate, const MixtureParams& truth) {
  if (estimate.size() != truth.size()) {
    throw std::invalid_argument("param_distance: mixtures differ in component count");
  }
  std::vector<std::size_t> perm(estimate.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    double sq = 0.0;
    for (std::size_t m = 0; m < perm.size(); ++m) {
      const UniformComponent& e = estimate.component(perm[m]);
      const UniformComponent& t = truth.component(m);
      const double da = estimate.weight(perm[m]) - truth.weight(m);
      const double dc = e.center() - t.center();
      const double db = e.half_width() - t.half_width();
      sq += da * da + dc * dc + db * db;
    }
    best = std::min(best, std::sqrt(sq));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace umix
