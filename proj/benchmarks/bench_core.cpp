#include <benchmark/benchmark.h>

#include "phonon_forge.hpp"

using namespace phonon_forge;

namespace {

ModelParams cell_params(int M, double gamma) {
  ModelParams p;
  p.targets = {M, M};
  p.gamma = {gamma, gamma};
  return calibrate(p);
}

Liouvillian cell_liouvillian(const ModelParams& p) {
  const ModeLayout l = cell_layout(p, 0);
  return build_liouvillian(build_effective_hamiltonian(p, l), build_dissipators(p, l));
}

void BM_build_liouvillian(benchmark::State& state) {
  const ModelParams p = cell_params(static_cast<int>(state.range(0)), 1e-6);
  for (auto _ : state) benchmark::DoNotOptimize(cell_liouvillian(p));
}
BENCHMARK(BM_build_liouvillian)->Arg(1)->Arg(5)->Arg(10);

void BM_nullspace_steady(benchmark::State& state) {
  const ModelParams p = cell_params(static_cast<int>(state.range(0)), 1e-6);
  const Liouvillian L = cell_liouvillian(p);
  const DensityMatrix rho0 = initial_state(p, cell_layout(p, 0));
  SteadyOptions o;
  o.method = SteadyMethod::nullspace;
  for (auto _ : state) benchmark::DoNotOptimize(steady_state(L, rho0, o));
}
BENCHMARK(BM_nullspace_steady)->Arg(1)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_negativity(benchmark::State& state) {
  const ModelParams p = cell_params(static_cast<int>(state.range(0)), 0.0);
  const MechanicalSolution s = solve_mechanical_steady(p, {});
  for (auto _ : state) benchmark::DoNotOptimize(measure_mechanical(*s.rho, pi / 4, false));
}
BENCHMARK(BM_negativity)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_wigner(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const DensityMatrix rho = DensityMatrix::pure(ModeLayout::single("b", d), fock_ket(d, d / 2));
  const WignerGrid g = WignerGrid::for_state(rho);
  for (auto _ : state) benchmark::DoNotOptimize(wigner(rho, g));
}
BENCHMARK(BM_wigner)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
