#include <benchmark/benchmark.h>

#include "curvlab/models.hpp"
#include "curvlab/spectra.hpp"

using namespace curvlab;

namespace {

void steklov(benchmark::State& state, Exec exec) {
  const auto g = to_general(unit_ball(3, 40));
  const int kmax = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(steklov_spectrum(g, 0.0, kmax, exec));
}

void neumann(benchmark::State& state, Exec exec) {
  const auto g = to_general(hyperbolic_product(4, 1.0, 1.0, 32));
  const int kmax = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(neumann_spectrum(g, -6.0, kmax, 4, exec));
}

}  // namespace

BENCHMARK_CAPTURE(steklov, serial, Exec::Serial)->Arg(10)->Arg(20)->Arg(40);
BENCHMARK_CAPTURE(steklov, parallel, Exec::Parallel)->Arg(10)->Arg(20)->Arg(40);
BENCHMARK_CAPTURE(neumann, serial, Exec::Serial)->Arg(10)->Arg(20);
BENCHMARK_CAPTURE(neumann, parallel, Exec::Parallel)->Arg(10)->Arg(20);

BENCHMARK_MAIN();
