// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "umix/kernels.hpp"
#include "umix/likelihood.hpp"
#include "umix/theory.hpp"

using namespace umix;

namespace {

MixtureParams truth() {
  return MixtureParams({0.6, 0.4}, {UniformComponent(0.5, 0.5), UniformComponent(0.6, 0.2)});
}

ConstraintSpace space_for(std::size_t n) {
  return ConstraintSpace::for_bounds(c_n(Schedule(1.0, 0.93), n), support_bounds(truth()));
}

template <bool Parallel>
void BM_profile_scan(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SampleSet sample = draw_sample(truth(), n, 1);
  const ConstraintSpace space = space_for(n);
  for (auto _ : state) {
    auto best = Parallel ? kernels::profile_scan(sample, truth().component(0), {0.6, 0.4}, space)
                         : kernels::profile_scan_serial(sample, truth().component(0), {0.6, 0.4}, space);
    benchmark::DoNotOptimize(best.loglik);
  }
}

template <bool Parallel>
void BM_pair_scan(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SampleSet sample = draw_sample(truth(), n, 2);
  const auto cands = candidate_intervals(sample, 0.001);
  for (auto _ : state) {
    auto best = Parallel ? kernels::pair_scan(cands, n, 1e-10) : kernels::pair_scan_serial(cands, n, 1e-10);
    benchmark::DoNotOptimize(best.loglik);
  }
}

template <bool Parallel>
void BM_surface(benchmark::State& state) {
  const SampleSet sample = draw_sample(truth(), 40, 3);
  const auto side = static_cast<std::size_t>(state.range(0));
  SurfaceAxes axes{uniform_axis(0.0, 1.0, side), log_spaced_axis(c_n(Schedule(1.0, 0.93), 40), 1.0, side)};
  for (auto _ : state) {
    auto grid = Parallel ? surface_grid(0.4, truth().component(0), sample, axes)
                         : surface_grid_serial(0.4, truth().component(0), sample, axes);
    benchmark::DoNotOptimize(grid.values.data());
  }
}

}  // namespace

BENCHMARK(BM_profile_scan<true>)->Arg(200)->Arg(500)->Arg(2000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_profile_scan<false>)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pair_scan<true>)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pair_scan<false>)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_surface<true>)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_surface<false>)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
