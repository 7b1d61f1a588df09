#include <benchmark/benchmark.h>

#include "sqlab/lab.hpp"

using namespace sqlab;

namespace {

GridPtr grid3() {
  static const GridPtr g = make_grid(RadialGrid::geometric(3, 20.0, 160, 1e-3));
  return g;
}

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

void ApScan(benchmark::State& state) {
  const auto w = power_weight(grid3(), 1.5);
  const auto fam = BallFamily::tensor(0.01, 10.0, 24, 0.01, 10.0, 24, 20.0);
  for (auto _ : state) benchmark::DoNotOptimize(ap_constant(w, 2.0, fam, exec_of(state)).value);
}

void HLMaximal(benchmark::State& state) {
  const auto g = grid3();
  const auto f = lab::test_panel(g)[2];
  const auto search = MaximalSearch::for_grid(*g);
  for (auto _ : state) benchmark::DoNotOptimize(hl_maximal(f, search, exec_of(state)));
}

void GaussianApply(benchmark::State& state) {
  const auto f = lab::test_panel(grid3())[0];
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_apply(f, 0.5, 0.0, exec_of(state)));
}

void PsiField(benchmark::State& state) {
  const auto f = lab::test_panel(grid3())[3];
  const auto times = TimeGrid::log_spaced(1e-2, 1e2, 33);
  for (auto _ : state) benchmark::DoNotOptimize(psi_field(f, times, exec_of(state)));
}

}  // namespace

// argument 0 is the serial reference path, 1 the OpenMP path
BENCHMARK(ApScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(HLMaximal)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(GaussianApply)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(PsiField)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
