#ifndef UMIX_SAMPLING_HPP
#define UMIX_SAMPLING_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "umix/core_model.hpp"

namespace umix {

// Independent random stream keyed by (master seed, stream index). Streams
// for different indices never share state, so parallel replications are
// reproducible regardless of scheduling. Output is bit-identical across
// platforms: mt19937_64 is fully specified and the real conversion below
// does not go through std::uniform_real_distribution.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Sorted observations x_1 <= ... <= x_n.
class SampleSet {
 public:
  SampleSet(std::vector<double> values, std::uint64_t seed,
            std::optional<MixtureParams> source = std::nullopt);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::uint64_t seed() const { return seed_; }
  const std::optional<MixtureParams>& source() const { return source_; }

 private:
  std::vector<double> values_;
  std::uint64_t seed_;
  std::optional<MixtureParams> source_;
};

// n i.i.d. draws: component m with probability alpha_m, then uniform on its
// support. Throws std::invalid_argument for n == 0.
SampleSet draw_sample(const MixtureParams& params, std::size_t n, std::uint64_t seed);

// Same, drawing from an explicit stream (used for per-replication streams).
SampleSet draw_sample(const MixtureParams& params, std::size_t n, RandomStream& stream,
                      std::uint64_t recorded_seed);

}  // namespace umix

#endif  // UMIX_SAMPLING_HPP
