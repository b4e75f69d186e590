#ifndef UMIX_LIKELIHOOD_HPP
#define UMIX_LIKELIHOOD_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "umix/core_model.hpp"
#include "umix/sampling.hpp"

namespace umix {

enum class IntervalConvention { half_open, closed };

struct LogLikelihood {
  double value = 0.0;  // -inf when some observation has zero density
  std::size_t n = 0;

  bool finite() const;
};

// log f(x; theta). Heights are combined on the log scale so components with
// log b far below the double range are handled exactly.
double log_density_at(const MixtureParams& params, double x,
                      IntervalConvention convention = IntervalConvention::half_open);

LogLikelihood log_likelihood(const MixtureParams& params, const SampleSet& sample,
                             IntervalConvention convention = IntervalConvention::half_open);

// R_n(V): observations inside the half-open intervals of V.
std::size_t count_in(const IntervalSet& intervals, const SampleSet& sample);

// log(exp(a) + exp(b)) without overflow; either argument may be -inf.
double log_add_exp(double a, double b);

// E[log f(X)] for X drawn from the density itself (the entropy with a
// minus sign), exact for step functions.
double expected_log_density(const PiecewiseDensity& density);


// Closed-form best log-likelihood of a boundary model whose spike (weight
// alpha, half-width c) holds exactly one observation while the other n - 1
// see only the background of height h:
//   log((1 - alpha) h + alpha / (2 c)) + (n - 1) log((1 - alpha) h).
double spike_competitor_loglik(double background_height, double spike_weight, LogScale c,
                               std::size_t n);
// Linear-scale overload; throws std::invalid_argument when c <= 0.
double spike_competitor_loglik(double background_height, double spike_weight, double c,
                               std::size_t n);

struct SurfaceAxes {
  std::vector<double> centers;
  std::vector<double> half_widths;
};

struct SurfaceGrid {
  std::vector<double> center_axis;
  std::vector<double> half_width_axis;
  // values[i * half_width_axis.size() + j] is the cell (center i, half-width j).
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * half_width_axis.size() + j]; }
  std::vector<double> row_at_half_width(std::size_t j) const;
};

// Log-likelihood of (1 - w) * background + w * U(a, b) over the grid.
// Rows are computed in parallel.
SurfaceGrid surface_grid(double fixed_weight, const UniformComponent& background,
                         const SampleSet& sample, const SurfaceAxes& axes);
// Serial reference for the same surface.
SurfaceGrid surface_grid_serial(double fixed_weight, const UniformComponent& background,
                                const SampleSet& sample, const SurfaceAxes& axes);

// Center axis that resolves every observation: the observations themselves,
// midpoints between neighbours and the ends of [lo, hi], padded up to
// `count` points by splitting the widest gaps.
std::vector<double> center_axis_with_sample(const SampleSet& sample, double lo, double hi,
                                            std::size_t count);
std::vector<double> uniform_axis(double lo, double hi, std::size_t count);
std::vector<double> log_spaced_axis(LogScale lo, double hi, std::size_t count);

// Number of maximal runs of consecutive entries strictly above `baseline`
// (with a relative tolerance of 1e-9).
std::size_t count_plateaus(std::span<const double> values, double baseline);

// CSV: first row "center\half_width" followed by the half-width axis, then
// one row per center. -inf is written as "-inf".
void write_surface_csv(std::ostream& out, const SurfaceGrid& grid);

}  // namespace umix

#endif  // UMIX_LIKELIHOOD_HPP
