#ifndef UMIX_KERNELS_HPP
#define UMIX_KERNELS_HPP

// Candidate-scoring scans behind the estimators. Each scan has an OpenMP
// version and a serial reference that scores candidates by direct
// likelihood evaluation; the tests hold them equal.
//
// Reductions compare (loglik, tie-break key) lexicographically, which is a
// total order on candidates, so results do not depend on thread count.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "umix/core_model.hpp"
#include "umix/estimator.hpp"
#include "umix/sampling.hpp"

namespace umix::kernels {

struct ProfileBest {
  double loglik;
  std::optional<CandidateInterval> candidate;
  std::size_t evaluations = 0;
};

// Best free component for (w0 * background + w1 * U(a, b)), closed supports.
ProfileBest profile_scan(const SampleSet& sample, const UniformComponent& background,
                         std::array<double, 2> weights, const ConstraintSpace& space);
ProfileBest profile_scan_serial(const SampleSet& sample, const UniformComponent& background,
                                std::array<double, 2> weights, const ConstraintSpace& space);

struct PairBest {
  double loglik;
  std::optional<std::pair<CandidateInterval, CandidateInterval>> pair;
  WeightFit weights;
  std::size_t evaluations = 0;
};

// Best two-component fit over admissible candidates. Only tuples whose runs
// jointly cover every observation are scored: the full run with anything,
// or a prefix run with an overlapping or adjacent suffix run.
PairBest pair_scan(std::span<const CandidateInterval> candidates, std::size_t n, double weight_tol);
// Scores every unordered pair.
PairBest pair_scan_serial(std::span<const CandidateInterval> candidates, std::size_t n,
                          double weight_tol);

// Weights and loglik for two candidates; loglik is -inf when some
// observation is in neither run.
WeightFit score_pair(const CandidateInterval& first, const CandidateInterval& second,
                     std::size_t n, double weight_tol);

// True when (loglik_a, a) should be preferred to (loglik_b, b): higher
// loglik, then smaller half-width, smaller center, earlier run.
bool prefer(double loglik_a, const CandidateInterval& a, double loglik_b,
            const CandidateInterval& b);

}  // namespace umix::kernels

#endif  // UMIX_KERNELS_HPP
