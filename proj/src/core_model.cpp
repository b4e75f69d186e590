#include "umix/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace umix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// alpha / (2 b). Shared by density_at and to_piecewise so both produce
// bit-identical heights.
double component_term(double weight, const UniformComponent& c) {
  return weight / (2.0 * c.half_width());
}

double accumulate_density(const MixtureParams& params, double x) {
  double sum = 0.0;
  for (std::size_t m = 0; m < params.size(); ++m) {
    const double w = params.weight(m);
    if (w > 0.0 && params.component(m).contains(x)) {
      sum += component_term(w, params.component(m));
    }
  }
  return sum;
}

}  // namespace

LogScale LogScale::of(double linear) {
  if (!(linear > 0.0)) {
    throw std::invalid_argument("LogScale::of: value must be positive");
  }
  return LogScale{std::log(linear)};
}

double LogScale::linear() const { return std::exp(value); }

bool LogScale::underflows() const {
  return value < std::log(std::numeric_limits<double>::min());
}

IntervalSet::IntervalSet(std::vector<Interval> intervals) {
  std::erase_if(intervals, [](const Interval& iv) { return !(iv.lo < iv.hi); });
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const Interval& iv : intervals) {
    if (!intervals_.empty() && iv.lo <= intervals_.back().hi) {
      intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
    } else {
      intervals_.push_back(iv);
    }
  }
}

double IntervalSet::total_length() const {
  double total = 0.0;
  for (const Interval& iv : intervals_) total += iv.length();
  return total;
}

bool IntervalSet::contains(double x) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](double v, const Interval& iv) { return v < iv.lo; });
  if (it == intervals_.begin()) return false;
  return std::prev(it)->contains(x);
}

UniformComponent::UniformComponent(double center, double half_width)
    : center_(center), half_width_(half_width) {
  if (!std::isfinite(center)) {
    throw std::invalid_argument("UniformComponent: center must be finite");
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw std::invalid_argument("UniformComponent: half_width must be positive and finite");
  }
  log_half_width_ = std::log(half_width);
}

UniformComponent UniformComponent::with_log_half_width(double center, double log_half_width) {
  if (!std::isfinite(center) || !std::isfinite(log_half_width)) {
    throw std::invalid_argument("UniformComponent: center and log half-width must be finite");
  }
  UniformComponent c;
  c.center_ = center;
  c.log_half_width_ = log_half_width;
  c.half_width_ = std::exp(log_half_width);
  if (!std::isfinite(c.half_width_)) {
    throw std::invalid_argument("UniformComponent: half_width overflows");
  }
  return c;
}

double UniformComponent::log_height() const { return -std::log(2.0) - log_half_width_; }

bool UniformComponent::contains(double x) const {
  const double lo = lower();
  const double hi = upper();
  if (!(lo < hi)) return x == center_;
  return lo <= x && x < hi;
}

bool UniformComponent::contains_closed(double x) const {
  const double lo = lower();
  const double hi = upper();
  if (!(lo < hi)) return x == center_;
  return lo <= x && x <= hi;
}

MixtureParams::MixtureParams(std::vector<double> weights, std::vector<UniformComponent> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (weights_.empty()) {
    throw std::invalid_argument("MixtureParams: at least one component is required");
  }
  if (weights_.size() != components_.size()) {
    throw std::invalid_argument("MixtureParams: weights and components differ in length");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("MixtureParams: weights must be nonnegative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw std::invalid_argument("MixtureParams: weights sum to " + std::to_string(sum) +
                                ", expected 1");
  }
}

MixtureParams MixtureParams::single(UniformComponent component) {
  return MixtureParams({1.0}, {component});
}

SupportBounds::SupportBounds(double lo, double hi) : l_min(lo), l_max(hi), length(hi - lo) {
  if (!(lo < hi)) {
    throw std::invalid_argument("SupportBounds: l_min must be below l_max");
  }
}

ConstraintSpace::ConstraintSpace(LogScale c_lower, Interval center_box, double half_width_cap)
    : log_c_lower_(c_lower),
      c_lower_(c_lower.linear()),
      center_box_(center_box),
      half_width_cap_(half_width_cap) {
  if (!std::isfinite(c_lower.value)) {
    throw std::invalid_argument("ConstraintSpace: c_lower must be positive");
  }
  if (!(half_width_cap > 0.0) || std::log(half_width_cap) < c_lower.value) {
    throw std::invalid_argument("ConstraintSpace: need 0 < c_lower <= half_width_cap");
  }
  if (!(center_box.lo <= center_box.hi)) {
    throw std::invalid_argument("ConstraintSpace: center box is empty");
  }
}

ConstraintSpace::ConstraintSpace(double c_lower, Interval center_box, double half_width_cap)
    : ConstraintSpace(LogScale::of(c_lower), center_box, half_width_cap) {
  c_lower_ = c_lower;
}

ConstraintSpace ConstraintSpace::for_bounds(LogScale c_lower, const SupportBounds& bounds) {
  return ConstraintSpace(c_lower, Interval{bounds.l_min, bounds.l_max}, bounds.length);
}

bool ConstraintSpace::admits_half_width(const UniformComponent& component) const {
  if (component.half_width() > half_width_cap_) return false;
  // Linear comparison is exact when both values are representable. The log
  // comparison also admits a width built from log c itself, whose exp may
  // round a hair below c.
  if (component.half_width() > 0.0 && c_lower_ > 0.0 && !log_c_lower_.underflows() &&
      component.half_width() >= c_lower_) {
    return true;
  }
  return component.log_half_width() >= log_c_lower_.value;
}

bool ConstraintSpace::admits_center(double center) const {
  return center_box_.lo <= center && center <= center_box_.hi;
}

PiecewiseDensity::PiecewiseDensity(std::vector<double> breakpoints, std::vector<double> heights) {
  if (heights.empty() || breakpoints.size() != heights.size() + 1) {
    throw std::invalid_argument("PiecewiseDensity: need one height per interval");
  }
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1])) {
      throw std::invalid_argument("PiecewiseDensity: breakpoints must be strictly increasing");
    }
  }
  for (double h : heights) {
    if (!(h >= 0.0) || !std::isfinite(h)) {
      throw std::invalid_argument("PiecewiseDensity: heights must be finite and nonnegative");
    }
  }
  // Canonical form: trim zero tails, merge equal neighbours.
  std::size_t first = 0;
  std::size_t last = heights.size();
  while (first < last && heights[first] == 0.0) ++first;
  while (last > first && heights[last - 1] == 0.0) --last;
  if (first == last) {
    throw std::invalid_argument("PiecewiseDensity: density is identically zero");
  }
  breakpoints_.push_back(breakpoints[first]);
  for (std::size_t t = first; t < last; ++t) {
    if (!heights_.empty() && heights_.back() == heights[t]) {
      breakpoints_.back() = breakpoints[t + 1];
    } else {
      heights_.push_back(heights[t]);
      breakpoints_.push_back(breakpoints[t + 1]);
    }
  }
}

double PiecewiseDensity::at(double x) const {
  if (x < breakpoints_.front() || x >= breakpoints_.back()) return 0.0;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return heights_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double PiecewiseDensity::integral() const {
  double total = 0.0;
  for (std::size_t t = 0; t < heights_.size(); ++t) {
    total += heights_[t] * (breakpoints_[t + 1] - breakpoints_[t]);
  }
  return total;
}

std::size_t PiecewiseDensity::positive_interval_count() const {
  return static_cast<std::size_t>(
      std::count_if(heights_.begin(), heights_.end(), [](double h) { return h > 0.0; }));
}

double density_at(const MixtureParams& params, double x) { return accumulate_density(params, x); }

PiecewiseDensity to_piecewise(const MixtureParams& params) {
  std::vector<double> points;
  points.reserve(2 * params.size());
  for (std::size_t m = 0; m < params.size(); ++m) {
    if (params.weight(m) <= 0.0) continue;
    const UniformComponent& c = params.component(m);
    if (c.collapsed()) {
      throw std::domain_error("to_piecewise: component " + std::to_string(m) +
                              " is narrower than double resolution at its center");
    }
    points.push_back(c.lower());
    points.push_back(c.upper());
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  // Membership is constant on each [points[t], points[t+1]), so the height
  // there is the density at its left end.
  std::vector<double> heights;
  heights.reserve(points.size() - 1);
  for (std::size_t t = 0; t + 1 < points.size(); ++t) {
    heights.push_back(accumulate_density(params, points[t]));
  }
  return PiecewiseDensity(std::move(points), std::move(heights));
}

SupportBounds support_bounds(const MixtureParams& params) {
  double lo = kInf;
  double hi = -kInf;
  for (std::size_t m = 0; m < params.size(); ++m) {
    if (params.weight(m) <= 0.0) continue;
    lo = std::min(lo, params.component(m).lower());
    hi = std::max(hi, params.component(m).upper());
  }
  return SupportBounds(lo, hi);
}

MixtureParams project_to_bounds(const MixtureParams& params, const SupportBounds& bounds) {
  std::vector<UniformComponent> projected;
  projected.reserve(params.size());
  for (const UniformComponent& c : params.components()) {
    const double lo = c.lower();
    const double hi = c.upper();
    if (lo >= bounds.l_min && hi <= bounds.l_max && c.center() >= bounds.l_min &&
        c.center() <= bounds.l_max && c.half_width() <= bounds.length) {
      projected.push_back(c);
      continue;
    }
    const double cut_lo = std::max(lo, bounds.l_min);
    const double cut_hi = std::min(hi, bounds.l_max);
    if (cut_lo < cut_hi) {
      // Shrink to the intersection; widen by ulps until rounding of
      // center +- b still covers it.
      const double center = cut_lo + 0.5 * (cut_hi - cut_lo);
      double b = 0.5 * (cut_hi - cut_lo);
      while (center - b > cut_lo || center + b < cut_hi) b = std::nextafter(b, kInf);
      if (b > c.half_width()) {
        projected.push_back(c);
      } else {
        projected.emplace_back(center, b);
      }
      continue;
    }
    // No overlap with the box: the component contributes nothing there, so
    // any placement inside dominates. Keep the width (capped) and move to
    // the nearest end.
    const double b = std::min(c.half_width(), 0.5 * bounds.length);
    const double center = (lo >= bounds.l_max) ? bounds.l_max - b : bounds.l_min + b;
    projected.emplace_back(std::clamp(center, bounds.l_min, bounds.l_max), b);
  }
  return MixtureParams(params.weights(), std::move(projected));
}

bool in_constraint_space(const MixtureParams& params, const ConstraintSpace& space) {
  return std::all_of(params.components().begin(), params.components().end(),
                     [&](const UniformComponent& c) {
                       return space.admits_half_width(c) && space.admits_center(c.center());
                     });
}

std::size_t small_component_count(const MixtureParams& params, double c0) {
  if (!(c0 > 0.0)) throw std::invalid_argument("small_component_count: c0 must be positive");
  return static_cast<std::size_t>(
      std::count_if(params.components().begin(), params.components().end(),
                    [c0](const UniformComponent& c) { return c.half_width() <= c0; }));
}

IntervalSet small_support(const MixtureParams& params, double c0) {
  if (!(c0 > 0.0)) throw std::invalid_argument("small_support: c0 must be positive");
  std::vector<Interval> pieces;
  for (std::size_t m = 0; m < params.size(); ++m) {
    const UniformComponent& c = params.component(m);
    if (params.weight(m) <= 0.0 || c.half_width() > c0) continue;
    if (c.collapsed()) {
      pieces.push_back({c.center(), std::nextafter(c.center(), kInf)});
    } else {
      pieces.push_back({c.lower(), c.upper()});
    }
  }
  return IntervalSet(std::move(pieces));
}

std::vector<double> sorted_heights(const PiecewiseDensity& density) {
  std::vector<double> h;
  for (double v : density.heights()) {
    if (v > 0.0) h.push_back(v);
  }
  std::sort(h.begin(), h.end());
  return h;
}

std::size_t tau_threshold(const MixtureParams& params, std::size_t n, double c0) {
  if (n == 0) throw std::invalid_argument("tau_threshold: n must be positive");
  if (!(c0 > 0.0)) throw std::invalid_argument("tau_threshold: c0 must be positive");
  const double log_c_prime = std::log(c0) - std::pow(static_cast<double>(n), 0.25);
  const double log_limit =
      std::log(static_cast<double>(params.size())) - std::log(2.0) - log_c_prime;
  const std::vector<double> heights = sorted_heights(to_piecewise(params));
  std::size_t tau = 0;
  for (double h : heights) {
    if (std::log(h) <= log_limit) ++tau;
  }
  return tau;
}

}  // namespace umix
