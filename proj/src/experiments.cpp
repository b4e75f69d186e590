#include "umix/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "umix/estimator.hpp"
#include "umix/likelihood.hpp"
#include "umix/sampling.hpp"
#include "umix/serialization.hpp"

namespace umix {

using nlohmann::json;

namespace {

json reference_truth_json() {
  return to_json(
      MixtureParams({0.6, 0.4}, {UniformComponent(0.5, 0.5), UniformComponent(0.6, 0.2)}));
}

// ---- config access ------------------------------------------------------

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(std::string("missing config key \"") + key + "\"");
  }
  return obj.at(key);
}

double get_real(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number");
  return v.get<double>();
}

std::uint64_t get_uint(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(std::string("\"") + key + "\" must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::size_t get_count(const json& obj, const char* key) {
  const std::uint64_t v = get_uint(obj, key);
  if (v == 0) throw ConfigError(std::string("\"") + key + "\" must be positive");
  return static_cast<std::size_t>(v);
}

std::string get_string(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_string()) throw ConfigError(std::string("\"") + key + "\" must be a string");
  return v.get<std::string>();
}

std::vector<std::size_t> get_counts(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_array() || v.empty()) throw ConfigError(std::string("\"") + key + "\" must be a nonempty array");
  std::vector<std::size_t> out;
  for (const json& e : v) {
    if (!e.is_number_integer() || (!e.is_number_unsigned() && e.get<std::int64_t>() <= 0) ||
        e.get<std::uint64_t>() == 0) {
      throw ConfigError(std::string("\"") + key + "\" entries must be positive integers");
    }
    out.push_back(e.get<std::size_t>());
  }
  return out;
}

std::vector<double> get_reals(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_array() || v.empty()) throw ConfigError(std::string("\"") + key + "\" must be a nonempty array");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw ConfigError(std::string("\"") + key + "\" entries must be numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

// Either {"c0", "d"} for c0 exp(-n^d) or {"kind": "n_log_n", "c0"} for
// c0 exp(-n log n).
class LowerBound {
 public:
  explicit LowerBound(const json& j) {
    kind_ = j.contains("kind") ? get_string(j, "kind") : "exp_power";
    c0_ = get_real(j, "c0");
    if (!(c0_ > 0.0)) throw ConfigError("schedule c0 must be positive");
    if (kind_ == "exp_power") {
      try {
        schedule_.emplace(c0_, get_real(j, "d"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    } else if (kind_ != "n_log_n") {
      throw ConfigError("schedule kind must be \"exp_power\" or \"n_log_n\"");
    }
  }

  LogScale at(std::size_t n) const {
    if (schedule_) return c_n(*schedule_, n);
    const double nd = static_cast<double>(n);
    return LogScale{std::log(c0_) - nd * std::log(nd)};
  }

  const std::optional<Schedule>& schedule() const { return schedule_; }

 private:
  std::string kind_;
  double c0_ = 1.0;
  std::optional<Schedule> schedule_;
};

struct Common {
  MixtureParams truth;
  LowerBound bound;
  std::vector<std::size_t> n_grid;
  std::size_t replications;
  std::uint64_t seed;
};

Common read_common(const json& config) {
  return Common{mixture_from_json(field(config, "truth")), LowerBound(field(config, "schedule")),
                get_counts(config, "n_grid"), get_count(config, "replications"),
                get_uint(config, "seed")};
}

// ---- helpers -------------------------------------------------------------

RandomStream cell_stream(std::uint64_t seed, std::size_t n, std::size_t replication) {
  return RandomStream(derive_seed(seed, n), replication);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Background and spike weight of the two-component competitor: the truth's
// first component keeps its weight, the second becomes the free one.
struct Competitor {
  UniformComponent background;
  std::array<double, 2> weights;
};

Competitor competitor_of(const MixtureParams& truth) {
  if (truth.size() != 2) throw ConfigError("this command needs a two-component truth");
  return Competitor{truth.component(0), {truth.weight(0), 1.0 - truth.weight(0)}};
}

template <class Cell>
void run_cells(ExperimentReport& report, std::size_t cells, Cell&& cell) {
  std::vector<json> rows(cells);
  std::vector<double> seconds(cells, 0.0);
  const double start = omp_get_wtime();
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(cells); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const double t0 = omp_get_wtime();
    try {
      rows[idx] = cell(idx);
    } catch (const std::exception& e) {
      rows[idx] = json{{"failed", true}, {"error", e.what()}};
    }
    seconds[idx] = omp_get_wtime() - t0;
  }
  report.timing["total_seconds"] = omp_get_wtime() - start;
  report.timing["row_seconds"] = seconds;
  for (json& row : rows) {
    if (row.value("failed", false)) ++report.failed_rows;
    report.rows.push_back(std::move(row));
  }
}

double bisect(const auto& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

// ---- config --------------------------------------------------------------

namespace {

void validate_section(const std::string& command, const json& config) {
  if (command == "surface") {
    const json& s = field(config, "surface");
    get_count(s, "n");
    if (get_count(s, "centers") < 2 || get_count(s, "half_widths") < 2) {
      throw ConfigError("surface axes need at least two points");
    }
    if (s.contains("b_max") && !(get_real(s, "b_max") > 0.0)) {
      throw ConfigError("surface b_max must be positive");
    }
  } else if (command == "table1") {
    if (!(get_real(field(config, "table1"), "crossover_n_max") >= 2.0)) {
      throw ConfigError("crossover_n_max must be at least 2");
    }
  } else if (command == "consistency") {
    const json& s = field(config, "consistency");
    const std::string mode = get_string(s, "mode");
    if (mode != "profile" && mode != "exact" && mode != "multistart") {
      throw ConfigError("consistency mode must be profile, exact or multistart");
    }
    get_count(s, "components");
    get_count(s, "restarts");
  } else if (command == "divergence") {
    if (!field(field(config, "divergence"), "fit_mle").is_boolean()) {
      throw ConfigError("\"fit_mle\" must be true or false");
    }
  } else if (command == "verify") {
    const json& checks = field(field(config, "verify"), "checks");
    if (!checks.is_array()) throw ConfigError("\"checks\" must be an array");
  } else if (command == "sample") {
    get_count(field(config, "sample"), "n");
  } else if (command == "fit") {
    const json& s = field(config, "fit");
    get_count(s, "n");
    get_count(s, "components");
    get_count(s, "restarts");
    const std::string mode = get_string(s, "mode");
    if (mode != "exact" && mode != "multistart") throw ConfigError("fit mode must be exact or multistart");
    if (!field(config, "schedule").contains("d")) throw ConfigError("fit needs schedule d");
  }
}

}  // namespace

json default_config(const std::string& command) {
  json c{{"truth", reference_truth_json()},
         {"schedule", {{"c0", 1.0}, {"d", 0.93}}},
         {"n_grid", {10, 50, 100, 500, 1000, 5000}},
         {"replications", 50},
         {"seed", 20240601}};
  if (command == "surface") {
    c["surface"] = {{"n", 40}, {"centers", 200}, {"half_widths", 200}};
  } else if (command == "table1") {
    c["table1"] = {{"crossover_n_max", 1e6}};
  } else if (command == "consistency") {
    c["n_grid"] = {50, 100, 200, 500, 1000, 2000};
    c["replications"] = 20;
    c["consistency"] = {{"mode", "profile"}, {"components", 2}, {"restarts", 20}};
  } else if (command == "divergence") {
    c["n_grid"] = {10, 100, 1000, 5000};
    c["replications"] = 20;
    c["schedule"] = {{"kind", "n_log_n"}, {"c0", 1.0}};
    c["divergence"] = {{"fit_mle", true}};
  } else if (command == "verify") {
    c["verify"] = {
        {"checks", {"okamoto", "covering", "bounded_rj"}},
        {"okamoto",
         {{"n", {10, 100, 1000, 10000}},
          {"p", {0.1, 0.3, 0.5, 0.7, 0.9}},
          {"delta", {0.01, 0.05, 0.1, 0.2}}}},
        {"covering", {{"trials", 100}, {"max_intervals", 4}, {"hits_per_trial", 100}}},
        {"bounded_rj", {{"n", 10000}, {"c0", 0.01}, {"trials", 2000}, {"epsilon", 0.0}}}};
  } else if (command == "sample") {
    c["sample"] = {{"n", 100}};
  } else if (command == "fit") {
    c["fit"] = {{"n", 100}, {"mode", "multistart"}, {"components", 2}, {"restarts", 20}};
  } else {
    throw ConfigError("unknown command \"" + command + "\"");
  }
  return c;
}

json resolve_config(const std::string& command, const json& user, const RunOptions& options) {
  json config = default_config(command);
  if (!user.is_null()) {
    if (!user.is_object()) throw ConfigError("config must be a JSON object");
    config.merge_patch(user);
  }
  if (options.seed) config["seed"] = *options.seed;
  if (options.replications) config["replications"] = *options.replications;
  read_common(config);
  validate_section(command, config);
  return config;
}

std::uint64_t config_hash(const json& config) {
  json copy = config;
  if (copy.is_object()) copy.erase("seed");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : copy.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json ExperimentReport::to_json() const {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(config)));
  return json{{"name", name},       {"version", kVersion},      {"config", config},
              {"config_hash", hash}, {"rows", rows},            {"summary", summary},
              {"failed_rows", failed_rows}, {"timing", timing}};
}

json deterministic_part(const json& report) {
  json copy = report;
  copy.erase("timing");
  return copy;
}

std::filesystem::path write_report(const ExperimentReport& report,
                                   const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const std::filesystem::path path = out_dir / (report.name + ".json");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report to '" + path.string() + "'");
  out << report.to_json().dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write report to '" + path.string() + "'");
  return path;
}

// ---- surface ---------------------------------------------------------------

ExperimentReport cmd_surface(const json& config, const std::filesystem::path& csv_path) {
  const Common common = read_common(config);
  const json& section = field(config, "surface");
  const std::size_t n = get_count(section, "n");
  const Competitor comp = competitor_of(common.truth);
  const SupportBounds box = support_bounds(common.truth);

  RandomStream stream = cell_stream(common.seed, n, 0);
  const SampleSet sample = draw_sample(common.truth, n, stream, common.seed);
  const LogScale b_min = common.bound.at(n);
  const double b_max = section.contains("b_max") ? get_real(section, "b_max") : box.length;
  SurfaceAxes axes;
  try {
    axes.centers = center_axis_with_sample(sample, box.l_min, box.l_max, get_count(section, "centers"));
    axes.half_widths = log_spaced_axis(b_min, b_max, get_count(section, "half_widths"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const double start = omp_get_wtime();
  const SurfaceGrid grid = surface_grid(comp.weights[1], comp.background, sample, axes);
  ExperimentReport report{"surface", config};
  report.timing["total_seconds"] = omp_get_wtime() - start;

  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot write surface CSV to '" + csv_path.string() + "'");
  write_surface_csv(out, grid);
  if (!out) throw std::runtime_error("cannot write surface CSV to '" + csv_path.string() + "'");

  // The baseline is the value where the free component covers nothing.
  const double baseline = static_cast<double>(n) * (std::log(comp.weights[0]) + comp.background.log_height());
  const std::size_t plateaus = count_plateaus(grid.row_at_half_width(0), baseline);
  report.summary = {{"n", n},
                    {"centers", axes.centers.size()},
                    {"half_widths", axes.half_widths.size()},
                    {"min_half_width", axes.half_widths.front()},
                    {"log_min_half_width", b_min.value},
                    {"baseline", baseline},
                    {"plateaus_at_min_half_width", plateaus},
                    {"csv", csv_path.filename().string()}};
  report.rows.push_back({{"sample", std::vector<double>(sample.values().begin(), sample.values().end())}});
  return report;
}

// ---- table1 ----------------------------------------------------------------

Crossover find_crossover(const MixtureParams& truth, const Schedule& schedule, double n_max) {
  const Competitor comp = competitor_of(truth);
  const double e0 = expected_log_density(to_piecewise(truth));
  const double log_bg = std::log(comp.weights[0]) + comp.background.log_height();
  const double log_half_spike = std::log(comp.weights[1] / 2.0);
  const auto gap = [&](double n) {
    const double log_c = std::log(schedule.c0()) - std::pow(n, schedule.exponent());
    return n * e0 - (-log_c + log_half_spike + (n - 1.0) * log_bg);
  };
  Crossover out;
  out.expected_log_density = e0;
  double previous = gap(1.0);
  for (double n = 2.0; n <= n_max; n += 1.0) {
    const double g = gap(n);
    if ((previous < 0.0) != (g < 0.0)) {
      const double root = bisect(gap, n - 1.0, n);
      (g >= 0.0 ? out.upward : out.downward).push_back(root);
    }
    previous = g;
  }
  return out;
}

ExperimentReport cmd_table1(const json& config) {
  const Common common = read_common(config);
  const Competitor comp = competitor_of(common.truth);
  const std::size_t R = common.replications;
  const std::size_t cells = common.n_grid.size() * R;

  ExperimentReport report{"table1", config};
  run_cells(report, cells, [&](std::size_t k) {
    const std::size_t n = common.n_grid[k / R];
    const std::size_t r = k % R;
    RandomStream stream = cell_stream(common.seed, n, r);
    const SampleSet sample = draw_sample(common.truth, n, stream, common.seed);
    const double truth_ll = log_likelihood(common.truth, sample).value;
    const double boundary = spike_competitor_loglik(std::exp(comp.background.log_height()),
                                                    comp.weights[1], common.bound.at(n), n);
    return json{{"n", n},
                {"replication", r},
                {"loglik_true", truth_ll},
                {"loglik_true_per_n", truth_ll / static_cast<double>(n)},
                {"loglik_boundary", boundary}};
  });

  json per_n = json::array();
  for (std::size_t g = 0; g < common.n_grid.size(); ++g) {
    std::vector<double> values;
    double boundary = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      const json& row = report.rows[g * R + r];
      if (row.value("failed", false)) continue;
      values.push_back(row.at("loglik_true").get<double>());
      boundary = row.at("loglik_boundary").get<double>();
    }
    const double n = static_cast<double>(common.n_grid[g]);
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    per_n.push_back({{"n", common.n_grid[g]},
                     {"mean_loglik_true", mean},
                     {"sd_loglik_true", sd},
                     {"mean_loglik_true_per_n", mean / n},
                     {"loglik_boundary", boundary},
                     {"true_minus_boundary", mean - boundary},
                     {"true_wins", mean > boundary}});
  }
  report.summary["per_n"] = std::move(per_n);

  if (common.bound.schedule()) {
    const double n_max = get_real(field(config, "table1"), "crossover_n_max");
    const Crossover cross = find_crossover(common.truth, *common.bound.schedule(), n_max);
    report.summary["expected_log_density"] = cross.expected_log_density;
    report.summary["crossover_upward"] = cross.upward;
    report.summary["crossover_downward"] = cross.downward;
  }
  return report;
}

// ---- consistency -----------------------------------------------------------

ExperimentReport cmd_consistency(const json& config) {
  const Common common = read_common(config);
  const json& section = field(config, "consistency");
  const std::string mode = get_string(section, "mode");
  const std::size_t M = get_count(section, "components");
  const std::size_t restarts = get_count(section, "restarts");
  if (mode != "profile" && mode != "exact" && mode != "multistart") {
    throw ConfigError("consistency mode must be profile, exact or multistart");
  }
  if (mode == "profile" && M != 2) throw ConfigError("profile mode fits M = 2");
  std::optional<Competitor> comp;
  if (mode == "profile") comp = competitor_of(common.truth);
  const SupportBounds box = support_bounds(common.truth);
  const std::size_t R = common.replications;

  ExperimentReport report{"consistency", config};
  run_cells(report, common.n_grid.size() * R, [&](std::size_t k) {
    const std::size_t n = common.n_grid[k / R];
    const std::size_t r = k % R;
    RandomStream stream = cell_stream(common.seed, n, r);
    const SampleSet sample = draw_sample(common.truth, n, stream, common.seed);
    const ConstraintSpace space = ConstraintSpace::for_bounds(common.bound.at(n), box);
    json row{{"n", n}, {"replication", r}, {"loglik_true", log_likelihood(common.truth, sample).value}};
    std::optional<FitResult> fit;
    if (mode == "profile") {
      fit = mle_profile_single(sample, comp->background, comp->weights, space);
    } else if (mode == "exact") {
      fit = mle_exact(sample, M, space, 1e-10);
    } else {
      fit = mle_multistart(sample, M, space, restarts, derive_seed(common.seed, n) ^ r);
    }
    row["loglik_mle"] = real_to_json(fit->loglik);
    row["l1_distance"] = mixture_l1_distance(fit->params, common.truth);
    row["param_distance"] = fit->params.size() == common.truth.size()
                                ? json(param_distance(fit->params, common.truth))
                                : json(nullptr);
    row["fit"] = to_json(fit->params);
    return row;
  });

  json per_n = json::array();
  std::vector<double> medians;
  for (std::size_t g = 0; g < common.n_grid.size(); ++g) {
    std::vector<double> l1;
    std::vector<double> pd;
    for (std::size_t r = 0; r < R; ++r) {
      const json& row = report.rows[g * R + r];
      if (row.value("failed", false)) continue;
      l1.push_back(row.at("l1_distance").get<double>());
      if (row.at("param_distance").is_number()) pd.push_back(row.at("param_distance").get<double>());
    }
    medians.push_back(median(l1));
    per_n.push_back({{"n", common.n_grid[g]},
                     {"median_l1_distance", real_to_json(medians.back())},
                     {"median_param_distance", real_to_json(median(pd))},
                     {"fits", l1.size()}});
  }
  report.summary["per_n"] = std::move(per_n);
  report.summary["median_l1_first"] = real_to_json(medians.front());
  report.summary["median_l1_last"] = real_to_json(medians.back());
  return report;
}

// ---- divergence ------------------------------------------------------------

ExperimentReport cmd_divergence(const json& config) {
  const Common common = read_common(config);
  const json& flag = field(field(config, "divergence"), "fit_mle");
  if (!flag.is_boolean()) throw ConfigError("\"fit_mle\" must be true or false");
  const bool fit_mle = flag.get<bool>();
  const Competitor comp = competitor_of(common.truth);
  const SupportBounds box = support_bounds(common.truth);
  const std::size_t R = common.replications;

  ExperimentReport report{"divergence", config};
  run_cells(report, common.n_grid.size() * R, [&](std::size_t k) {
    const std::size_t n = common.n_grid[k / R];
    const std::size_t r = k % R;
    RandomStream stream = cell_stream(common.seed, n, r);
    const SampleSet sample = draw_sample(common.truth, n, stream, common.seed);
    const LogScale c = common.bound.at(n);
    const MixtureParams spike(
        {comp.weights[0], comp.weights[1]},
        {comp.background, UniformComponent::with_log_half_width(sample[0], c.value)});
    const double spike_ll = log_likelihood(spike, sample).value;
    const double truth_ll = log_likelihood(common.truth, sample).value;
    json row{{"n", n},
             {"replication", r},
             {"x1", sample[0]},
             {"log_c_n", c.value},
             {"loglik_spike", real_to_json(spike_ll)},
             {"loglik_true", real_to_json(truth_ll)},
             {"spike_wins", spike_ll > truth_ll}};
    if (fit_mle) {
      const FitResult fit = mle_profile_single(sample, comp.background, comp.weights,
                                               ConstraintSpace::for_bounds(c, box));
      const double log_b = fit.params.component(1).log_half_width();
      row["loglik_mle"] = real_to_json(fit.loglik);
      row["mle_log_half_width"] = log_b;
      row["mle_at_boundary"] = log_b == c.value;
    }
    return row;
  });

  json per_n = json::array();
  bool everywhere = true;
  bool all_boundary = true;
  for (std::size_t g = 0; g < common.n_grid.size(); ++g) {
    std::size_t wins = 0;
    std::size_t boundary = 0;
    for (std::size_t r = 0; r < R; ++r) {
      const json& row = report.rows[g * R + r];
      if (row.value("failed", false)) continue;
      wins += row.at("spike_wins").get<bool>() ? 1 : 0;
      if (fit_mle) boundary += row.at("mle_at_boundary").get<bool>() ? 1 : 0;
    }
    everywhere = everywhere && wins == R;
    all_boundary = all_boundary && boundary == R;
    json entry{{"n", common.n_grid[g]}, {"spike_wins", wins}, {"replications", R}};
    if (fit_mle) entry["mle_at_boundary"] = boundary;
    per_n.push_back(std::move(entry));
  }
  report.summary["per_n"] = std::move(per_n);
  report.summary["spike_wins_everywhere"] = everywhere;
  if (fit_mle) report.summary["mle_at_boundary_everywhere"] = all_boundary;
  return report;
}

// ---- verify ----------------------------------------------------------------

namespace {

void verify_okamoto(const json& section, ExperimentReport& report) {
  for (std::size_t n : get_counts(section, "n")) {
    for (double p : get_reals(section, "p")) {
      for (double delta : get_reals(section, "delta")) {
        if (static_cast<double>(n) * delta < 1.0) continue;
        const double log_tail = log_binomial_tail_exact(n, p, delta);
        const double log_bound = log_okamoto_bound(n, delta);
        const bool pass = log_tail < log_bound;
        report.rows.push_back({{"check", "okamoto"},
                               {"n", n},
                               {"p", p},
                               {"delta", delta},
                               {"tail", binomial_tail_exact(n, p, delta)},
                               {"bound", okamoto_bound(n, delta)},
                               {"log_tail", real_to_json(log_tail)},
                               {"log_bound", log_bound},
                               {"pass", pass}});
        if (!pass) ++report.failed_rows;
      }
    }
  }
}

void verify_covering(const json& section, std::uint64_t seed, ExperimentReport& report) {
  const std::size_t trials = get_count(section, "trials");
  const std::size_t max_intervals = get_count(section, "max_intervals");
  const std::size_t hits = get_count(section, "hits_per_trial");
  for (std::size_t t = 0; t < trials; ++t) {
    RandomStream rng(derive_seed(seed, 0xC0FE), t);
    const std::size_t M = 1 + static_cast<std::size_t>(rng.below(max_intervals));
    std::vector<Interval> parts;
    for (std::size_t m = 0; m < M; ++m) {
      const double a = rng.uniform(0.0, 1.0);
      parts.push_back({a, a + rng.uniform(0.005, 0.3)});
    }
    const IntervalSet j0(std::move(parts));
    const double c = std::exp(rng.uniform(std::log(1e-3), std::log(0.2)));
    const Covering cover = cover_support(j0, c);
    const double span = j0.intervals().back().hi - j0.intervals().front().lo;
    const double limit = span / (2.0 * c) + static_cast<double>(j0.size());
    std::size_t worst_hit = 0;
    bool covered = true;
    for (std::size_t k = 0; k < hits; ++k) {
      const Interval& src = j0.intervals()[rng.below(j0.size())];
      const double x = rng.uniform(src.lo, src.hi);
      covered = covered && std::any_of(cover.pieces.begin(), cover.pieces.end(),
                                       [&](const Interval& p) { return p.contains(x); });
      if (src.length() >= 2.0 * c) {
        const double lo = rng.uniform(src.lo, src.hi - 2.0 * c);
        // The three-piece bound is per source interval; a short neighbour's
        // piece may overhang into this one.
        const Covering own = cover_support(IntervalSet({src}), c);
        worst_hit = std::max(worst_hit, own.pieces_hit(lo, lo + 2.0 * c));
      }
    }
    const bool pass = static_cast<double>(cover.count()) <= limit && covered && worst_hit <= 3;
    report.rows.push_back({{"check", "covering"},
                           {"trial", t},
                           {"intervals", j0.size()},
                           {"c", c},
                           {"pieces", cover.count()},
                           {"limit", limit},
                           {"max_pieces_hit", worst_hit},
                           {"covers_sampled_points", covered},
                           {"pass", pass}});
    if (!pass) ++report.failed_rows;
  }
}

void verify_bounded(const json& section, const MixtureParams& truth, std::uint64_t seed,
                    ExperimentReport& report) {
  const BoundedRjReport r = verify_bounded_rj(truth, get_real(section, "c0"), get_count(section, "n"),
                                              get_count(section, "trials"), seed);
  const double eps = get_real(section, "epsilon");
  json row = to_json(r);
  row["check"] = "bounded_rj";
  row["epsilon"] = eps;
  row["pass"] = r.empirical_sup < r.bound + eps;
  if (!row["pass"].get<bool>()) ++report.failed_rows;
  report.rows.push_back(std::move(row));
}

}  // namespace

ExperimentReport cmd_verify(const json& config) {
  const Common common = read_common(config);
  const json& section = field(config, "verify");
  ExperimentReport report{"verify", config};
  const double start = omp_get_wtime();
  for (const json& check : field(section, "checks")) {
    const std::string name = check.is_string() ? check.get<std::string>() : "";
    if (name == "okamoto") {
      verify_okamoto(field(section, "okamoto"), report);
    } else if (name == "covering") {
      verify_covering(field(section, "covering"), common.seed, report);
    } else if (name == "bounded_rj") {
      verify_bounded(field(section, "bounded_rj"), common.truth, common.seed, report);
    } else {
      throw ConfigError("unknown check \"" + check.dump() + "\"");
    }
  }
  report.timing["total_seconds"] = omp_get_wtime() - start;
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;
  for (const json& row : report.rows) {
    auto& [passed, total] = tally[row.at("check").get<std::string>()];
    ++total;
    if (row.at("pass").get<bool>()) ++passed;
  }
  for (const auto& [name, counts] : tally) {
    report.summary[name] = {{"passed", counts.first}, {"total", counts.second}};
  }
  report.summary["all_pass"] = report.failed_rows == 0;
  return report;
}

}  // namespace umix
