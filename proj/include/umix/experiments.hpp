#ifndef UMIX_EXPERIMENTS_HPP
#define UMIX_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "umix/core_model.hpp"
#include "umix/theory.hpp"

namespace umix {

inline constexpr const char* kVersion = "umix 1.0.0";

// Command-line overrides applied on top of the config file.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
};

struct ExperimentReport {
  std::string name;
  nlohmann::json config;
  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json summary = nlohmann::json::object();
  // Wall-clock data. Not part of the determinism contract.
  nlohmann::json timing = nlohmann::json::object();
  std::size_t failed_rows = 0;

  nlohmann::json to_json() const;
};

// Defaults for one command: the two-component reference truth, c0 = 1,
// d = 0.93, n in {10, ..., 5000}, plus a command-specific section.
nlohmann::json default_config(const std::string& command);

// Merge-patches `user` over the defaults, applies overrides and validates.
// Throws ConfigError.
nlohmann::json resolve_config(const std::string& command, const nlohmann::json& user,
                              const RunOptions& options = {});

// FNV-1a over the canonical dump of the config without its "seed".
std::uint64_t config_hash(const nlohmann::json& config);

// Writes the log-likelihood surface CSV to `csv_path`.
ExperimentReport cmd_surface(const nlohmann::json& config, const std::filesystem::path& csv_path);
ExperimentReport cmd_table1(const nlohmann::json& config);
ExperimentReport cmd_consistency(const nlohmann::json& config);
ExperimentReport cmd_divergence(const nlohmann::json& config);
ExperimentReport cmd_verify(const nlohmann::json& config);

// The expected-value curves behind table1: n E0[log f] for the truth and
// -log c_n + log(alpha / 2) + (n - 1) log((1 - alpha) h) for the boundary
// model.
struct Crossover {
  double expected_log_density = 0.0;
  // Points where (truth - boundary) turns from negative to positive, each
  // refined by bisection over real n.
  std::vector<double> upward;
  // Points where it turns from positive to negative.
  std::vector<double> downward;
};

Crossover find_crossover(const MixtureParams& truth, const Schedule& schedule, double n_max);

// Writes <out>/<name>.json; throws std::runtime_error naming the path on failure.
std::filesystem::path write_report(const ExperimentReport& report,
                                   const std::filesystem::path& out_dir);

// Strips the "timing" block; two runs with the same config must agree on the rest.
nlohmann::json deterministic_part(const nlohmann::json& report);

}  // namespace umix

#endif  // UMIX_EXPERIMENTS_HPP
