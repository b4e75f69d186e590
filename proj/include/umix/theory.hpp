#ifndef UMIX_THEORY_HPP
#define UMIX_THEORY_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "umix/core_model.hpp"

namespace umix {

// Lower-bound schedule c_n = c0 * exp(-n^d).
class Schedule {
 public:
  // Throws std::invalid_argument unless c0 > 0 and 0 < d < 1.
  Schedule(double c0, double exponent);

  double c0() const { return c0_; }
  double exponent() const { return exponent_; }

 private:
  double c0_;
  double exponent_;
};

// log c_n = log c0 - n^d.
LogScale c_n(const Schedule& schedule, std::size_t n);
// log c'_n = log c0 - n^{1/4}.
LogScale c_n_prime(double c0, std::size_t n);

// exp(-2 n delta^2), the binomial upper-tail bound.
double okamoto_bound(std::size_t n, double delta);
// -2 n delta^2; comparisons use this once the bound leaves double range.
double log_okamoto_bound(std::size_t n, double delta);

// P(Z / n - p >= delta) for Z ~ Bin(n, p), summed from the upper end with
// log-domain coefficients and compensated accumulation.
double binomial_tail_exact(std::size_t n, double p, double delta);
// Log of the same tail, -inf when the tail is empty. Stays accurate where
// the tail itself underflows.
double log_binomial_tail_exact(std::size_t n, double p, double delta);

// Smallest k with k / n - p >= delta, allowing for rounding in n (p + delta).
std::size_t binomial_tail_start(std::size_t n, double p, double delta);

// Short pieces of common length 2c laid over each interval of J0, with the
// last piece of every interval right-aligned to its end.
struct Covering {
  std::vector<Interval> pieces;
  IntervalSet source;
  double piece_length = 0.0;

  std::size_t count() const { return pieces.size(); }
  // Pieces with positive-length overlap with [lo, hi).
  std::size_t pieces_hit(double lo, double hi) const;
};

// Throws std::invalid_argument when c <= 0.
Covering cover_support(const IntervalSet& j0, double c);

// Support of a mixture as disjoint intervals (at most M of them).
IntervalSet mixture_support(const MixtureParams& params);

struct BoundedRjReport {
  double bound = 0.0;          // 3 M u 2 c0
  double empirical_sup = 0.0;  // max over all searched theta of R_n(J) / n
  double random_sup = 0.0;
  double greedy_sup = 0.0;
  double max_height = 0.0;     // u
  std::size_t n = 0;
  double c0 = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;

  double slack() const { return bound - empirical_sup; }
};

// Draws one sample of size n from `truth` and measures sup (1/n) R_n(J(theta))
// over theta with at least one component of half-width <= c0: `trials`
// random parameter points plus a greedy placement of M windows of width
// 2 c0 on the densest stretches of the sample. Trials run in parallel on
// independent streams.
BoundedRjReport verify_bounded_rj(const MixtureParams& truth, double c0, std::size_t n,
                                  std::size_t trials, std::uint64_t seed);

// Largest count of sorted values inside any half-open window of the given width.
std::size_t densest_window(std::span<const double> sorted, double width, double* window_start);

}  // namespace umix

#endif  // UMIX_THEORY_HPP
