// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "umix/estimator.hpp"
#include "umix/experiments.hpp"
#include "umix/likelihood.hpp"
#include "umix/serialization.hpp"
#include "umix/theory.hpp"

using namespace umix;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

MixtureParams reference_truth() {
  return MixtureParams({0.6, 0.4}, {UniformComponent(0.5, 0.5), UniformComponent(0.6, 0.2)});
}

// 0.64 log 1.6 + 0.36 log 0.6
const double kE0 = 0.64 * std::log(1.6) + 0.36 * std::log(0.6);

Outcome boundary_column() {
  const Schedule schedule(1.0, 0.93);
  const std::size_t ns[] = {10, 50, 100, 500, 1000, 5000};
  const double published[] = {2.305, 11.38, 20.26, 67.11, 104.7, 199.3};
  const double tol[] = {0.05, 0.05, 0.05, 0.05, 0.05, 0.5};
  bool ok = true;
  std::string detail;
  for (int k = 0; k < 6; ++k) {
    const double v = spike_competitor_loglik(1.0, 0.4, c_n(schedule, ns[k]), ns[k]);
    ok = ok && std::abs(v - published[k]) <= tol[k];
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%zu:%.4f", k ? " " : "", ns[k], v);
    detail += buf;
  }
  return {ok, detail};
}

Outcome true_model_mean() {
  const json config = resolve_config("table1", {{"n_grid", {5000}}, {"replications", 50}});
  const ExperimentReport r = cmd_table1(config);
  const double per_n = r.summary.at("per_n")[0].at("mean_loglik_true_per_n").get<double>();
  char buf[96];
  std::snprintf(buf, sizeof buf, "mean/n=%.5f target=%.5f reps=50", per_n, kE0);
  return {r.failed_rows == 0 && std::abs(per_n - 0.11690) <= 0.005, buf};
}

Outcome crossover() {
  const Crossover c = find_crossover(reference_truth(), Schedule(1.0, 0.93), 1e6);
  char buf[128];
  std::snprintf(buf, sizeof buf, "upward=%zu n*=%.3f (downward=%zu below n=10)", c.upward.size(),
                c.upward.empty() ? 0.0 : c.upward[0], c.downward.size());
  const bool ok = c.upward.size() == 1 && c.upward[0] > 500.0 && c.upward[0] < 1000.0 &&
                  std::abs(c.expected_log_density - kE0) < 1e-12;
  return {ok, buf};
}

Outcome oracle_equivalence() {
  RandomStream rng(20240601, 4);
  std::size_t matched = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const std::size_t M = 1 + trial % 2;
    const SampleSet s = draw_sample(reference_truth(), n, 9000 + trial);
    const double c = std::exp(rng.uniform(-8.0, -1.5));
    const oracle::DenseGridMle grid(s.values(), c);
    const FitResult fit = mle_exact(s, M, ConstraintSpace(c, Interval{-10.0, 10.0}, 10.0), 1e-12);
    const double diff = std::abs(fit.loglik - (M == 1 ? grid.single() : grid.pair()));
    worst = std::max(worst, diff);
    if (diff < 1e-6) ++matched;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%zu/100 within 1e-6, worst=%.2e", matched, worst);
  return {matched == 100, buf};
}

Outcome consistency() {
  const ExperimentReport r = cmd_consistency(resolve_config("consistency", json()));
  const double first = r.summary.at("per_n").front().at("median_l1_distance").get<double>();
  const double last = r.summary.at("per_n").back().at("median_l1_distance").get<double>();
  char buf[96];
  std::snprintf(buf, sizeof buf, "median L1 n=50: %.4f, n=2000: %.4f, failed=%zu", first, last,
                r.failed_rows);
  return {r.failed_rows == 0 && last < first && last < 0.15, buf};
}

Outcome divergence() {
  const ExperimentReport r = cmd_divergence(resolve_config("divergence", json()));
  std::size_t wins = 0;
  std::size_t boundary = 0;
  for (const json& row : r.rows) {
    wins += row.value("spike_wins", false) ? 1 : 0;
    boundary += row.value("mle_at_boundary", false) ? 1 : 0;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "spike wins %zu/%zu, MLE at c_n %zu/%zu", wins, r.rows.size(),
                boundary, r.rows.size());
  const bool ok = r.failed_rows == 0 && r.rows.size() == 80 && wins == 80 && boundary == 80;
  return {ok, buf};
}

Outcome okamoto() {
  const json config = resolve_config("verify", {{"verify", {{"checks", {"okamoto"}}}}});
  const ExperimentReport r = cmd_verify(config);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%zu/%zu grid points strict", r.rows.size() - r.failed_rows,
                r.rows.size());
  return {r.failed_rows == 0 && r.rows.size() == 70, buf};
}

Outcome peaks() {
  const auto dir = std::filesystem::temp_directory_path() / "umix_acceptance";
  std::filesystem::create_directories(dir);
  const ExperimentReport r = cmd_surface(resolve_config("surface", json()), dir / "surface.csv");
  const std::size_t p = r.summary.at("plateaus_at_min_half_width").get<std::size_t>();
  return {p == 40, "plateaus=" + std::to_string(p)};
}

Outcome structural() {
  RandomStream rng(77, 9);
  std::size_t bad_integral = 0;
  std::size_t bad_steps = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t M = 1 + rng.below(5);
    std::vector<double> w(M);
    double total = 0.0;
    for (double& v : w) total += (v = 0.05 + rng.uniform01());
    for (double& v : w) v /= total;
    std::vector<UniformComponent> comps;
    for (std::size_t m = 0; m < M; ++m) comps.emplace_back(rng.uniform(-1.0, 2.0), 0.01 + rng.uniform01());
    const PiecewiseDensity p = to_piecewise(MixtureParams(std::move(w), std::move(comps)));
    if (std::abs(p.integral() - 1.0) > 1e-12) ++bad_integral;
    if (p.positive_interval_count() > 2 * M) ++bad_steps;
  }

  const json vconf = resolve_config("verify", {{"verify", {{"checks", {"covering"}}}}});
  const ExperimentReport cover = cmd_verify(vconf);

  const SupportBounds box = support_bounds(reference_truth());
  std::size_t bad_dominance = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t M = 1 + rng.below(4);
    std::vector<double> w(M, 1.0 / static_cast<double>(M));
    std::vector<UniformComponent> comps;
    for (std::size_t m = 0; m < M; ++m) comps.emplace_back(rng.uniform(-1.0, 2.0), 0.001 + rng.uniform01());
    const MixtureParams theta(std::move(w), std::move(comps));
    const MixtureParams proj = project_to_bounds(theta, box);
    std::vector<double> probes = to_piecewise(theta).breakpoints();
    for (double x : to_piecewise(proj).breakpoints()) probes.push_back(x);
    for (int k = 0; k < 200; ++k) probes.push_back(rng.uniform(box.l_min, box.l_max));
    for (double x : probes) {
      if (x >= box.l_min && x < box.l_max && density_at(proj, x) < density_at(theta, x)) {
        ++bad_dominance;
        break;
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "integral off=%zu, T>2M=%zu, covering failed=%zu/%zu, dominance failed=%zu/1000",
                bad_integral, bad_steps, cover.failed_rows, cover.rows.size(), bad_dominance);
  const bool ok = bad_integral == 0 && bad_steps == 0 && cover.failed_rows == 0 && bad_dominance == 0;
  return {ok, buf};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_seconds;  // only enforced where the limit is a hard one
    bool enforce_budget;
  };
  const std::vector<Criterion> criteria = {
      {"1 table1 boundary column", boundary_column, 1.0, true},
      {"2 true-model mean loglik", true_model_mean, 60.0, false},
      {"3 crossover in (500, 1000)", crossover, 1.0, true},
      {"4 exact MLE vs dense-grid oracle", oracle_equivalence, 600.0, false},
      {"5 consistency median L1", consistency, 600.0, false},
      {"6 divergence spike wins", divergence, 600.0, false},
      {"7 okamoto strict", okamoto, 60.0, false},
      {"8 surface plateaus = 40", peaks, 60.0, false},
      {"9 structural invariants", structural, 60.0, false},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.enforce_budget && secs >= c.budget_seconds) {
      o.pass = false;
      o.detail += " (over time budget)";
    }
    std::printf("%s  %-34s %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
