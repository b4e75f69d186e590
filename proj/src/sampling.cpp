#include "umix/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace umix {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(derive_seed(seed, stream)) {}

double RandomStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
  const double x = lo + (hi - lo) * uniform01();
  return x < hi ? x : std::nextafter(hi, lo);
}

std::uint64_t RandomStream::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("RandomStream::below: bound must be positive");
  // Rejection sampling keeps the result unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % bound;
}

SampleSet::SampleSet(std::vector<double> values, std::uint64_t seed,
                     std::optional<MixtureParams> source)
    : values_(std::move(values)), seed_(seed), source_(std::move(source)) {
  if (values_.empty()) throw std::invalid_argument("SampleSet: at least one value is required");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("SampleSet: values must be finite");
  }
  std::sort(values_.begin(), values_.end());
}

SampleSet draw_sample(const MixtureParams& params, std::size_t n, RandomStream& stream,
                      std::uint64_t recorded_seed) {
  if (n == 0) throw std::invalid_argument("draw_sample: n must be positive");
  std::vector<double> cumulative(params.size());
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t m = 0; m < params.size(); ++m) {
    running += params.weight(m);
    cumulative[m] = running;
    if (params.weight(m) > 0.0) last_positive = m;
  }

  std::vector<double> values;
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = stream.uniform01() * running;
    std::size_t m = last_positive;
    for (std::size_t k = 0; k < params.size(); ++k) {
      if (u < cumulative[k] && params.weight(k) > 0.0) {
        m = k;
        break;
      }
    }
    const UniformComponent& c = params.component(m);
    values.push_back(c.collapsed() ? c.center() : stream.uniform(c.lower(), c.upper()));
  }
  return SampleSet(std::move(values), recorded_seed, params);
}

SampleSet draw_sample(const MixtureParams& params, std::size_t n, std::uint64_t seed) {
  RandomStream stream(seed);
  return draw_sample(params, n, stream, seed);
}

}  // namespace umix
