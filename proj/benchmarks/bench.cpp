#include <benchmark/benchmark.h>

#include <cmath>

#include <epsim/coherent.hpp>
#include <epsim/ep.hpp>
#include <epsim/fock.hpp>
#include <epsim/lattice.hpp>
#include <epsim/spectral.hpp>

namespace {

using namespace epsim;

LatticeSpec dimer() { return {2, 1.0, 0.0, {1.0, 0.0}, Boundary::Open}; }
LatticeSpec trimer() {
  return {3, 1.0 / std::sqrt(2.0), 0.0, {0.0, 1.0, 0.0}, Boundary::Open};
}

void BM_LiftHamiltonian(benchmark::State& state) {
  const int photons = static_cast<int>(state.range(0));
  const Matrix h1 = build_hamiltonian(trimer(), 1.3);
  const FockBasis basis = FockBasis::enumerate(photons, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lift_hamiltonian(h1, basis));
  }
  state.SetLabel("dim=" + std::to_string(basis.dimension()));
}
BENCHMARK(BM_LiftHamiltonian)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_PropagatorRegular(benchmark::State& state) {
  const int photons = static_cast<int>(state.range(0));
  const FockBasis basis = FockBasis::enumerate(photons, 3);
  const Matrix h = lift_hamiltonian(build_hamiltonian(trimer(), 1.3), basis);
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagator(h, 1.7));
  }
  state.SetLabel("dim=" + std::to_string(basis.dimension()));
}
BENCHMARK(BM_PropagatorRegular)->Arg(4)->Arg(8)->Arg(16);

void BM_PropagatorDefective(benchmark::State& state) {
  // at the critical loss the eigenbasis is unusable and the propagator must
  // fall back to scaling-and-squaring
  const int photons = static_cast<int>(state.range(0));
  const FockBasis basis = FockBasis::enumerate(photons, 2);
  const Matrix h = lift_hamiltonian(build_hamiltonian(dimer(), 2.0), basis);
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagator(h, 1.7));
  }
  state.SetLabel("dim=" + std::to_string(basis.dimension()));
}
BENCHMARK(BM_PropagatorDefective)->Arg(6)->Arg(12)->Arg(24);

void BM_Sweep(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  const LatticeSpec spec = trimer();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep(spec, 0.0, 4.0, steps));
  }
}
BENCHMARK(BM_Sweep)->Arg(101)->Arg(401);

void BM_FindEps(benchmark::State& state) {
  const SpectralSweep sw = sweep(dimer(), 0.0, 4.0, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_eps(sw));
  }
}
BENCHMARK(BM_FindEps)->Arg(101)->Arg(401);

void BM_PostselectedStep(benchmark::State& state) {
  // one full postselect pipeline step: evolve amplitudes, project, normalize
  const int photons = static_cast<int>(state.range(0));
  const Vector em = exceptional_mode(dimer(), 2.0, Complex(std::sqrt(20.0), 0.0));
  const Matrix u = propagator(build_hamiltonian(dimer(), 4.0), 1.3);
  const FockBasis basis = FockBasis::enumerate(photons, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(postselect(project_to_fock(u * em, basis)));
  }
}
BENCHMARK(BM_PostselectedStep)->Arg(6)->Arg(12)->Arg(24);

}  // namespace

BENCHMARK_MAIN();
