#include "umix/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace umix {

using nlohmann::json;

json real_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return v;
}

double real_from_json(const json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ConfigError(std::string("expected a number for ") + what);
}

json to_json(const MixtureParams& params) {
  json comps = json::array();
  for (const UniformComponent& c : params.components()) {
    json entry{{"center", c.center()}, {"half_width", c.half_width()}};
    if (c.collapsed() || c.half_width() < std::numeric_limits<double>::min()) {
      entry["log_half_width"] = c.log_half_width();
    }
    comps.push_back(std::move(entry));
  }
  return json{{"weights", params.weights()}, {"components", std::move(comps)}};
}

MixtureParams mixture_from_json(const json& j) {
  if (!j.is_object() || !j.contains("weights") || !j.contains("components")) {
    throw ConfigError("mixture needs \"weights\" and \"components\"");
  }
  const json& w = j.at("weights");
  const json& cs = j.at("components");
  if (!w.is_array() || !cs.is_array()) {
    throw ConfigError("mixture \"weights\" and \"components\" must be arrays");
  }
  std::vector<double> weights;
  for (const json& v : w) weights.push_back(real_from_json(v, "weight"));
  std::vector<UniformComponent> comps;
  try {
    for (const json& c : cs) {
      if (!c.is_object() || !c.contains("center")) {
        throw ConfigError("component needs \"center\"");
      }
      const double center = real_from_json(c.at("center"), "center");
      if (c.contains("log_half_width")) {
        comps.push_back(UniformComponent::with_log_half_width(
            center, real_from_json(c.at("log_half_width"), "log_half_width")));
      } else if (c.contains("half_width")) {
        comps.emplace_back(center, real_from_json(c.at("half_width"), "half_width"));
      } else {
        throw ConfigError("component needs \"half_width\"");
      }
    }
    return MixtureParams(std::move(weights), std::move(comps));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

json to_json(const ConstraintSpace& space) {
  return json{{"log_c_lower", space.log_c_lower().value},
              {"c_lower", space.c_lower()},
              {"center_box", {space.center_box().lo, space.center_box().hi}},
              {"half_width_cap", space.half_width_cap()}};
}

json to_json(const FitResult& fit) {
  json runs = json::array();
  for (const auto& [first, last] : fit.runs) runs.push_back({first, last});
  return json{{"params", to_json(fit.params)},
              {"loglik", real_to_json(fit.loglik)},
              {"mode", to_string(fit.mode)},
              {"evaluations", fit.evaluations},
              {"constraint_space", to_json(fit.space)},
              {"runs", std::move(runs)}};
}

json to_json(const BoundedRjReport& report) {
  return json{{"bound", report.bound},
              {"empirical_sup", report.empirical_sup},
              {"random_sup", report.random_sup},
              {"greedy_sup", report.greedy_sup},
              {"max_height", report.max_height},
              {"slack", report.slack()},
              {"n", report.n},
              {"c0", report.c0},
              {"trials", report.trials},
              {"seed", report.seed}};
}

void write_sample_csv(std::ostream& out, const SampleSet& sample) {
  out << "# seed: " << sample.seed() << '\n';
  if (sample.source()) out << "# theta: " << to_json(*sample.source()).dump() << '\n';
  out << "x\n";
  char buf[32];
  for (double x : sample.values()) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf << '\n';
  }
}

SampleSet read_sample_csv(std::istream& in) {
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::optional<MixtureParams> source;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "x") continue;
    if (line.starts_with("# seed: ")) {
      seed = std::stoull(line.substr(8));
    } else if (line.starts_with("# theta: ")) {
      source = mixture_from_json(json::parse(line.substr(9)));
    } else if (line.front() != '#') {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(line, &used);
      } catch (const std::exception&) {
        throw ConfigError("sample CSV: cannot parse \"" + line + "\"");
      }
      if (used != line.size() && line.find_first_not_of(" \r\t", used) != std::string::npos) {
        throw ConfigError("sample CSV: trailing text in \"" + line + "\"");
      }
      values.push_back(x);
    }
  }
  try {
    return SampleSet(std::move(values), seed, std::move(source));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace umix
