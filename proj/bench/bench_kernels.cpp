// Serial reference vs OpenMP kernel for each batch operation.
// Thread count follows OMP_NUM_THREADS.

#include "mpsrisk/analysis.hpp"
#include "mpsrisk/kernels.hpp"

#include <benchmark/benchmark.h>

using namespace mpsrisk;

namespace {

std::vector<AgentSpec> agents(std::size_t n) {
  std::vector<AgentSpec> specs;
  specs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) specs.emplace_back(Crra{-1.0 + 3.0 * static_cast<double>(i) / n}, 0.1, 7);
  return specs;
}

std::vector<NormalizedUtilityPoint> points(std::size_t n) {
  CounterRng rng(3);
  std::vector<NormalizedUtilityPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = rng.uniform(), b = rng.uniform();
    if (a > b) std::swap(a, b);
    out.emplace_back(a, b);
  }
  return out;
}

template <bool Parallel>
void BM_Simulate(benchmark::State& state) {
  const auto specs = agents(static_cast<std::size_t>(state.range(0)));
  PopulationConfig config;
  for (auto _ : state) {
    auto r = Parallel ? simulate_population(specs, paper_battery(), hl_battery(), config)
                      : simulate_population_serial(specs, paper_battery(), hl_battery(), config);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_ConcavitySweep(benchmark::State& state) {
  for (auto _ : state) {
    auto r = Parallel ? concavity_sweep(static_cast<std::uint64_t>(state.range(0)), 1)
                      : concavity_sweep_serial(static_cast<std::uint64_t>(state.range(0)), 1);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Classify(benchmark::State& state) {
  const auto pts = points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto r = Parallel ? classify_points(pts) : classify_points_serial(pts);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_CrraCurve(benchmark::State& state) {
  const double step = 10.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto r = Parallel ? crra_curve(-5.0, 5.0, step) : crra_curve_serial(-5.0, 5.0, step);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Summarize(benchmark::State& state) {
  PopulationConfig config;
  const auto records = simulate_population(agents(static_cast<std::size_t>(state.range(0))), paper_battery(), hl_battery(), config);
  for (auto _ : state) {
    auto r = Parallel ? summarize(records) : summarize_serial(records);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Simulate<false>)->Name("simulate_population/serial")->Arg(1000)->Arg(10000)->UseRealTime();
BENCHMARK(BM_Simulate<true>)->Name("simulate_population/omp")->Arg(1000)->Arg(10000)->UseRealTime();
BENCHMARK(BM_ConcavitySweep<false>)->Name("concavity_sweep/serial")->Arg(10000)->UseRealTime();
BENCHMARK(BM_ConcavitySweep<true>)->Name("concavity_sweep/omp")->Arg(10000)->UseRealTime();
BENCHMARK(BM_Classify<false>)->Name("classify_points/serial")->Arg(1 << 20)->UseRealTime();
BENCHMARK(BM_Classify<true>)->Name("classify_points/omp")->Arg(1 << 20)->UseRealTime();
BENCHMARK(BM_CrraCurve<false>)->Name("crra_curve/serial")->Arg(100000)->UseRealTime();
BENCHMARK(BM_CrraCurve<true>)->Name("crra_curve/omp")->Arg(100000)->UseRealTime();
BENCHMARK(BM_Summarize<false>)->Name("summarize/serial")->Arg(10000)->UseRealTime();
BENCHMARK(BM_Summarize<true>)->Name("summarize/omp")->Arg(10000)->UseRealTime();

BENCHMARK_MAIN();
