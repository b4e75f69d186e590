#include "umix/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace umix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Below this half-width alpha / (2 b) may leave double range.
constexpr double kNaiveHalfWidthFloor = 1e-300;

bool covers(const UniformComponent& c, double x, IntervalConvention convention) {
  return convention == IntervalConvention::half_open ? c.contains(x) : c.contains_closed(x);
}

std::string format_double(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool LogLikelihood::finite() const { return std::isfinite(value); }

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_density_at(const MixtureParams& params, double x, IntervalConvention convention) {
  bool naive = true;
  bool any = false;
  for (std::size_t m = 0; m < params.size(); ++m) {
    if (params.weight(m) > 0.0 && covers(params.component(m), x, convention)) {
      any = true;
      if (!(params.component(m).half_width() > kNaiveHalfWidthFloor)) naive = false;
    }
  }
  if (!any) return kNegInf;

  if (naive) {
    // Same term order and arithmetic as density_at.
    double sum = 0.0;
    for (std::size_t m = 0; m < params.size(); ++m) {
      const double w = params.weight(m);
      if (w > 0.0 && covers(params.component(m), x, convention)) {
        sum += w / (2.0 * params.component(m).half_width());
      }
    }
    return std::log(sum);
  }

  double acc = kNegInf;
  for (std::size_t m = 0; m < params.size(); ++m) {
    const double w = params.weight(m);
    if (w > 0.0 && covers(params.component(m), x, convention)) {
      acc = log_add_exp(acc, std::log(w) + params.component(m).log_height());
    }
  }
  return acc;
}

double expected_log_density(const PiecewiseDensity& density) {
  double total = 0.0;
  for (std::size_t t = 0; t < density.heights().size(); ++t) {
    const double h = density.heights()[t];
    if (h > 0.0) total += h * density.interval(t).length() * std::log(h);
  }
  return total;
}

LogLikelihood log_likelihood(const MixtureParams& params, const SampleSet& sample,
                             IntervalConvention convention) {
  double total = 0.0;
  for (double x : sample.values()) {
    const double v = log_density_at(params, x, convention);
    if (v == kNegInf) return {kNegInf, sample.size()};
    total += v;
  }
  return {total, sample.size()};
}

std::size_t count_in(const IntervalSet& intervals, const SampleSet& sample) {
  const auto xs = sample.values();
  std::size_t count = 0;
  for (const Interval& iv : intervals.intervals()) {
    const auto lo = std::lower_bound(xs.begin(), xs.end(), iv.lo);
    const auto hi = std::lower_bound(xs.begin(), xs.end(), iv.hi);
    count += static_cast<std::size_t>(hi - lo);
  }
  return count;
}

double spike_competitor_loglik(double background_height, double spike_weight, LogScale c,
                               std::size_t n) {
  if (n == 0) throw std::invalid_argument("spike_competitor_loglik: n must be positive");
  if (!(spike_weight > 0.0 && spike_weight < 1.0)) {
    throw std::invalid_argument("spike_competitor_loglik: spike weight must lie in (0, 1)");
  }
  if (!(background_height > 0.0)) {
    throw std::invalid_argument("spike_competitor_loglik: background height must be positive");
  }
  if (!std::isfinite(c.value)) {
    throw std::invalid_argument("spike_competitor_loglik: c must be positive");
  }
  const double log_background = std::log((1.0 - spike_weight) * background_height);
  const double log_spike = std::log(spike_weight) - std::log(2.0) - c.value;
  return log_add_exp(log_background, log_spike) +
         static_cast<double>(n - 1) * log_background;
}

double spike_competitor_loglik(double background_height, double spike_weight, double c,
                               std::size_t n) {
  if (!(c > 0.0)) throw std::invalid_argument("spike_competitor_loglik: c must be positive");
  return spike_competitor_loglik(background_height, spike_weight, LogScale::of(c), n);
}

std::vector<double> SurfaceGrid::row_at_half_width(std::size_t j) const {
  std::vector<double> row(center_axis.size());
  for (std::size_t i = 0; i < center_axis.size(); ++i) row[i] = at(i, j);
  return row;
}

namespace {

double surface_cell(double fixed_weight, const UniformComponent& background,
                    const SampleSet& sample, double center, double half_width) {
  const MixtureParams params({1.0 - fixed_weight, fixed_weight},
                             {background, UniformComponent(center, half_width)});
  return log_likelihood(params, sample).value;
}

void check_surface_inputs(double fixed_weight, const SurfaceAxes& axes) {
  if (axes.centers.empty() || axes.half_widths.empty()) {
    throw std::invalid_argument("surface_grid: axes must be nonempty");
  }
  if (!(fixed_weight >= 0.0 && fixed_weight <= 1.0)) {
    throw std::invalid_argument("surface_grid: weight must lie in [0, 1]");
  }
}

}  // namespace

SurfaceGrid surface_grid(double fixed_weight, const UniformComponent& background,
                         const SampleSet& sample, const SurfaceAxes& axes) {
  check_surface_inputs(fixed_weight, axes);
  SurfaceGrid grid{axes.centers, axes.half_widths, {}};
  const std::size_t rows = axes.centers.size();
  const std::size_t cols = axes.half_widths.size();
  grid.values.assign(rows * cols, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows); ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      grid.values[static_cast<std::size_t>(i) * cols + j] =
          surface_cell(fixed_weight, background, sample, axes.centers[i], axes.half_widths[j]);
    }
  }
  return grid;
}

SurfaceGrid surface_grid_serial(double fixed_weight, const UniformComponent& background,
                                const SampleSet& sample, const SurfaceAxes& axes) {
  check_surface_inputs(fixed_weight, axes);
  SurfaceGrid grid{axes.centers, axes.half_widths, {}};
  for (double a : axes.centers) {
    for (double b : axes.half_widths) {
      grid.values.push_back(surface_cell(fixed_weight, background, sample, a, b));
    }
  }
  return grid;
}

std::vector<double> uniform_axis(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> axis(count);
  for (std::size_t k = 0; k < count; ++k) {
    axis[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  axis.back() = hi;
  return axis;
}

std::vector<double> log_spaced_axis(LogScale lo, double hi, std::size_t count) {
  if (!(hi > 0.0)) throw std::invalid_argument("log_spaced_axis: upper end must be positive");
  if (lo.underflows()) {
    throw std::invalid_argument("log_spaced_axis: lower end is below double range");
  }
  std::vector<double> axis;
  for (double v : uniform_axis(lo.value, std::log(hi), count)) axis.push_back(std::exp(v));
  return axis;
}

std::vector<double> center_axis_with_sample(const SampleSet& sample, double lo, double hi,
                                            std::size_t count) {
  std::vector<double> axis(sample.values().begin(), sample.values().end());
  for (std::size_t i = 0; i + 1 < sample.size(); ++i) {
    axis.push_back(sample[i] + 0.5 * (sample[i + 1] - sample[i]));
  }
  axis.push_back(lo);
  axis.push_back(hi);
  std::sort(axis.begin(), axis.end());
  axis.erase(std::unique(axis.begin(), axis.end()), axis.end());

  // Pad to `count` by splitting the widest gap, so sample points and
  // midpoints stay on the axis.
  while (axis.size() < count && axis.size() >= 2) {
    std::size_t widest = 0;
    for (std::size_t k = 1; k + 1 < axis.size(); ++k) {
      if (axis[k + 1] - axis[k] > axis[widest + 1] - axis[widest]) widest = k;
    }
    const double mid = axis[widest] + 0.5 * (axis[widest + 1] - axis[widest]);
    if (!(axis[widest] < mid && mid < axis[widest + 1])) break;
    axis.insert(axis.begin() + static_cast<std::ptrdiff_t>(widest) + 1, mid);
  }
  return axis;
}

std::size_t count_plateaus(std::span<const double> values, double baseline) {
  const double threshold = baseline + 1e-9 * std::max(1.0, std::abs(baseline));
  std::size_t runs = 0;
  bool inside = false;
  for (double v : values) {
    const bool elevated = v > threshold;
    if (elevated && !inside) ++runs;
    inside = elevated;
  }
  return runs;
}

void write_surface_csv(std::ostream& out, const SurfaceGrid& grid) {
  out << "center\\half_width";
  for (double b : grid.half_width_axis) out << ',' << format_double(b);
  out << '\n';
  for (std::size_t i = 0; i < grid.center_axis.size(); ++i) {
    out << format_double(grid.center_axis[i]);
    for (std::size_t j = 0; j < grid.half_width_axis.size(); ++j) {
      out << ',' << format_double(grid.at(i, j));
    }
    out << '\n';
  }
}

}  // namespace umix
