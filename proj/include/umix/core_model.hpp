#ifndef UMIX_CORE_MODEL_HPP
#define UMIX_CORE_MODEL_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace umix {

// A quantity carried on the log scale. Half-width bounds such as
// exp(-n^d) leave double range long before the experiments stop, so the
// log value is authoritative and the linear value is a convenience.
struct LogScale {
  double value = 0.0;

  static LogScale of(double linear);

  // exp(value); 0 when the linear value is below the smallest double.
  double linear() const;
  bool underflows() const;
};

// Half-open interval [lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x < hi; }
};

// Sorted, pairwise disjoint half-open intervals.
class IntervalSet {
 public:
  IntervalSet() = default;
  // Sorts and merges overlapping or touching intervals; drops empty ones.
  explicit IntervalSet(std::vector<Interval> intervals);

  const std::vector<Interval>& intervals() const { return intervals_; }
  std::size_t size() const { return intervals_.size(); }
  bool empty() const { return intervals_.empty(); }
  double total_length() const;
  bool contains(double x) const;

 private:
  std::vector<Interval> intervals_;
};

// Uniform density on [center - half_width, center + half_width).
//
// The half-width may be far below the smallest double (a spike placed on
// one observation with b = c_n). Such a component is "collapsed": its
// endpoints round to the center, and its support is taken to be the
// single representable point {center}.
class UniformComponent {
 public:
  UniformComponent(double center, double half_width);
  static UniformComponent with_log_half_width(double center, double log_half_width);

  double center() const { return center_; }
  double half_width() const { return half_width_; }
  double log_half_width() const { return log_half_width_; }
  double lower() const { return center_ - half_width_; }
  double upper() const { return center_ + half_width_; }
  // log(1 / (2 b)).
  double log_height() const;
  bool collapsed() const { return !(lower() < upper()); }

  // Half-open membership, the convention for model densities.
  bool contains(double x) const;
  // Closed membership, used when searching for likelihood suprema.
  bool contains_closed(double x) const;

  bool operator==(const UniformComponent&) const = default;

 private:
  UniformComponent() = default;

  double center_ = 0.0;
  double half_width_ = 1.0;
  double log_half_width_ = 0.0;
};

class MixtureParams {
 public:
  static constexpr double kWeightSumTolerance = 1e-12;

  // Throws std::invalid_argument when sizes differ, M == 0, a weight is
  // negative, or the weights do not sum to one.
  MixtureParams(std::vector<double> weights, std::vector<UniformComponent> components);

  static MixtureParams single(UniformComponent component);

  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<UniformComponent>& components() const { return components_; }
  double weight(std::size_t m) const { return weights_[m]; }
  const UniformComponent& component(std::size_t m) const { return components_[m]; }

  bool operator==(const MixtureParams&) const = default;

 private:
  std::vector<double> weights_;
  std::vector<UniformComponent> components_;
};

struct SupportBounds {
  double l_min = 0.0;
  double l_max = 1.0;
  double length = 1.0;

  SupportBounds() = default;
  SupportBounds(double lo, double hi);
};

// A realized constrained parameter space: half-widths in [c_lower, cap],
// centers in the closed box.
class ConstraintSpace {
 public:
  ConstraintSpace(LogScale c_lower, Interval center_box, double half_width_cap);
  ConstraintSpace(double c_lower, Interval center_box, double half_width_cap);

  // The box from the dominance projection: centers in [l_min, l_max],
  // half-widths in [c_lower, L].
  static ConstraintSpace for_bounds(LogScale c_lower, const SupportBounds& bounds);

  LogScale log_c_lower() const { return log_c_lower_; }
  double c_lower() const { return c_lower_; }
  Interval center_box() const { return center_box_; }
  double half_width_cap() const { return half_width_cap_; }

  bool admits_half_width(const UniformComponent& component) const;
  bool admits_center(double center) const;

 private:
  LogScale log_c_lower_;
  double c_lower_;  // linear value as given, 0 when below double range
  Interval center_box_;
  double half_width_cap_;
};

// Canonical step-function form of a mixture density: height[t] on
// [breakpoints[t], breakpoints[t+1]), zero outside. Adjacent equal heights
// are merged and the outer heights are positive.
class PiecewiseDensity {
 public:
  PiecewiseDensity(std::vector<double> breakpoints, std::vector<double> heights);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& heights() const { return heights_; }

  double at(double x) const;
  double integral() const;
  // T(theta): the number of intervals with positive height.
  std::size_t positive_interval_count() const;
  Interval interval(std::size_t t) const { return {breakpoints_[t], breakpoints_[t + 1]}; }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> heights_;
};

double density_at(const MixtureParams& params, double x);

// Throws std::domain_error when a positively weighted component is collapsed,
// since its mass cannot be carried by a step function in doubles.
PiecewiseDensity to_piecewise(const MixtureParams& params);

SupportBounds support_bounds(const MixtureParams& params);

// Moves every component into [l_min, l_max] with half-width at most L while
// the density does not decrease anywhere on [l_min, l_max).
MixtureParams project_to_bounds(const MixtureParams& params, const SupportBounds& bounds);

bool in_constraint_space(const MixtureParams& params, const ConstraintSpace& space);

// K(theta) = #{m : b_m <= c0}.
std::size_t small_component_count(const MixtureParams& params, double c0);

// J(theta): union of supports of positively weighted components with b_m <= c0.
IntervalSet small_support(const MixtureParams& params, double c0);

// Number of positive step heights not exceeding M / (2 c0 exp(-n^{1/4})).
std::size_t tau_threshold(const MixtureParams& params, std::size_t n, double c0);

// Positive step heights in ascending order.
std::vector<double> sorted_heights(const PiecewiseDensity& density);

}  // namespace umix

#endif  // UMIX_CORE_MODEL_HPP
