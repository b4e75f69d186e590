#ifndef UMIX_ESTIMATOR_HPP
#define UMIX_ESTIMATOR_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "umix/core_model.hpp"
#include "umix/likelihood.hpp"
#include "umix/sampling.hpp"

namespace umix {

class UncoveredPointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InstanceTooLargeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// A closed interval that contains exactly the observations
// x[run_start..run_end] (inclusive) and no others. Its half-width is
// max(span / 2, c_lower), since with membership fixed the likelihood only
// grows as the interval narrows.
struct CandidateInterval {
  std::size_t run_start = 0;
  std::size_t run_end = 0;
  UniformComponent interval;

  double center() const { return interval.center(); }
  double half_width() const { return interval.half_width(); }
  std::size_t run_length() const { return run_end - run_start + 1; }
};

// The candidate for one run, or nullopt when no interval of half-width at
// least c_lower can hold exactly that run.
std::optional<CandidateInterval> candidate_for_run(const SampleSet& sample, std::size_t run_start,
                                                   std::size_t run_end, LogScale c_lower);

std::vector<CandidateInterval> candidate_intervals(const SampleSet& sample, LogScale c_lower);
std::vector<CandidateInterval> candidate_intervals(const SampleSet& sample, double c_lower);

struct WeightOptions {
  double tol = 1e-10;
  std::size_t max_iterations = 10000;
  bool record_trace = false;
  IntervalConvention convention = IntervalConvention::half_open;
};

struct WeightFit {
  std::vector<double> weights;
  double loglik = 0.0;
  std::size_t iterations = 0;
  std::vector<double> trace;  // loglik after each iteration, when requested
};

// Mixing weights maximizing the log-likelihood for fixed supports, by the
// fixed-point iteration alpha_m <- mean responsibility of m, started from
// the uniform vector. The objective is concave in alpha, so the limit is a
// global maximum. Throws UncoveredPointError when an observation lies in
// no support.
WeightFit optimize_weights(const SampleSet& sample, std::span<const UniformComponent> supports,
                           double tol);
WeightFit optimize_weights(const SampleSet& sample, std::span<const UniformComponent> supports,
                           const WeightOptions& options);

// Observations grouped by which components cover them. Bit m of `mask` is
// set when component m covers the group.
struct CoveragePattern {
  std::uint64_t mask = 0;
  double count = 0.0;
};

WeightFit optimize_pattern_weights(std::span<const double> log_heights,
                                   std::span<const CoveragePattern> patterns,
                                   const WeightOptions& options);

enum class FitMode { exact, multistart, profile };

std::string to_string(FitMode mode);

struct FitResult {
  MixtureParams params;
  double loglik;
  FitMode mode;
  std::size_t evaluations;
  ConstraintSpace space;
  // Observation runs held by each fitted component (closed supports).
  std::vector<std::pair<std::size_t, std::size_t>> runs;
};

// Profile fit of (w0 * background + w1 * U(a, b)) over the free component.
// Exact over the candidate set; ties go to the smaller b, then smaller a.
FitResult mle_profile_single(const SampleSet& sample, const UniformComponent& background,
                             std::array<double, 2> weights, const ConstraintSpace& space);

struct ExactOptions {
  std::size_t max_n = 200;
};

// Exhaustive constrained MLE for M in {1, 2}. Throws UnsupportedError for
// other M and InstanceTooLargeError when n exceeds options.max_n.
FitResult mle_exact(const SampleSet& sample, std::size_t components, const ConstraintSpace& space,
                    double weight_tol, const ExactOptions& options = {});

// Hill climbing over run assignments from `restarts` seeded starts.
// Restart r always uses stream r, so more restarts never give a worse fit.
FitResult mle_multistart(const SampleSet& sample, std::size_t components,
                         const ConstraintSpace& space, std::size_t restarts, std::uint64_t seed,
                         double weight_tol = 1e-10);

// Hill climbing from a given run assignment.
FitResult local_search(const SampleSet& sample,
                       std::vector<std::pair<std::size_t, std::size_t>> runs,
                       const ConstraintSpace& space, double weight_tol = 1e-10);

// Log-likelihood of a run assignment with weights optimized (closed
// supports); -inf when a run has no admissible candidate or an observation
// is left uncovered.
WeightFit score_runs(const SampleSet& sample,
                     std::span<const std::pair<std::size_t, std::size_t>> runs,
                     const ConstraintSpace& space, double weight_tol);

// Exact integral of |p - q| over the merged breakpoint partition.
double density_l1_distance(const PiecewiseDensity& p, const PiecewiseDensity& q);

// L1 distance between two mixtures. Collapsed components are treated as
// point masses at their centers; the error from that is of order b.
double mixture_l1_distance(const MixtureParams& p, const MixtureParams& q);

// Smallest Euclidean distance between the stacked (alpha, a, b) vectors
// over relabelings of `estimate`. Throws std::invalid_argument when M differs.
double param_distance(const MixtureParams& estimate, const MixtureParams& truth);

}  // namespace umix

#endif  // UMIX_ESTIMATOR_HPP
