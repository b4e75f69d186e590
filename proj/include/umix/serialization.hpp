#ifndef UMIX_SERIALIZATION_HPP
#define UMIX_SERIALIZATION_HPP

#include <iosfwd>
#include <stdexcept>

#include <json.hpp>

#include "umix/core_model.hpp"
#include "umix/estimator.hpp"
#include "umix/sampling.hpp"
#include "umix/theory.hpp"

namespace umix {

// Malformed JSON input. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values become the strings "inf", "-inf" and "nan" so that
// reports stay valid JSON.
nlohmann::json real_to_json(double v);
double real_from_json(const nlohmann::json& j, const char* what);

// {"weights": [...], "components": [{"center", "half_width"}]}. Components
// whose half-width is below the normal double range also carry
// "log_half_width", which takes precedence when read back.
nlohmann::json to_json(const MixtureParams& params);
MixtureParams mixture_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ConstraintSpace& space);
nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const BoundedRjReport& report);

// Single-column CSV preceded by '#' comment lines with the seed and source.
void write_sample_csv(std::ostream& out, const SampleSet& sample);
// Reads the format above; comment lines and a "x" header are skipped.
SampleSet read_sample_csv(std::istream& in);

}  // namespace umix

#endif  // UMIX_SERIALIZATION_HPP
