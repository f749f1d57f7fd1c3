#include <benchmark/benchmark.h>

#include "junction/hamiltonians.hpp"
#include "junction/oracle.hpp"
#include "junction/solver.hpp"
#include "junction/trajectory.hpp"

using namespace junction;

namespace {

GridSpec grid_for(double h) {
  GridSpec g;
  g.h = h;
  g.dt = 0.4 * h;
  return g;
}

// One sweep of the update on the benchmark problem; range(0) is 1/h.
void BM_Sweep(benchmark::State& state) {
  const auto spec = oracle_example_spec(0.25);
  const auto grid = grid_for(1.0 / static_cast<double>(state.range(0)));
  const SemiLagrangianScheme scheme(spec, grid, {static_cast<std::size_t>(state.range(1))});
  auto in = initial_field(spec, grid);
  ValueField out;
  for (auto _ : state) {
    scheme.update(in, out);
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(in.values().size()));
}
BENCHMARK(BM_Sweep)->Args({10, 1})->Args({20, 1})->Args({40, 1})->Args({40, 2})->Unit(benchmark::kMillisecond);

// State-dependent dynamics take the general interpolation path.
void BM_SweepGeneral(benchmark::State& state) {
  auto planes = oracle_example_spec(0.25).planes();
  for (auto& p : planes) p.dynamics.state_gain = {0.0, 0.01, 0.01, 0.0};
  const ProblemSpec spec(JunctionGeometry(2), planes, 0.25);
  const auto grid = grid_for(0.1);
  const SemiLagrangianScheme scheme(spec, grid);
  auto in = initial_field(spec, grid);
  ValueField out;
  for (auto _ : state) {
    scheme.update(in, out);
    benchmark::DoNotOptimize(out.values().data());
  }
}
BENCHMARK(BM_SweepGeneral)->Unit(benchmark::kMillisecond);

void BM_Hamiltonian(benchmark::State& state) {
  const auto spec = oracle_example_spec(1.0);
  double p = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hamiltonian(spec, 1, 1.0, 0.0, {p, 1.0}));
    p += 1e-3;
  }
}
BENCHMARK(BM_Hamiltonian);

void BM_Simulate(benchmark::State& state) {
  const auto spec = oracle_example_spec(0.25);
  const ControlSchedule s{{{2.0, 1, find_control(spec, 1, "a1_032").control},
                           {38.0, 2, find_control(spec, 2, "a2_000").control}}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(cost(spec, simulate(spec, JunctionPoint::make(1, 2.0, 1.5), s, 0.05)).total());
  }
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
