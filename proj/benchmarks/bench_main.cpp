#include <benchmark/benchmark.h>

#include <random>

#include "sedlab/dynamics.hpp"
#include "sedlab/ensemble_stats.hpp"
#include "sedlab/schrodinger_ref.hpp"
#include "sedlab/zpf_field.hpp"

using namespace sedlab;

namespace {

const PhysicalParams kUnits(1, 1, 1e-3, 20);

void BM_DirectFieldSum(benchmark::State& state) {
  const ZpfSpectrum s{kUnits, static_cast<std::size_t>(state.range(0))};
  const auto r = sample_realization(s, 1);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(force_at(r, t));
    t += 0.01;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DirectFieldSum)->Arg(4000)->Arg(40000);

// Per-sample cost of the chirp-z sampler over a full trajectory's time grid.
void BM_ChirpSampler(benchmark::State& state) {
  const ZpfSpectrum s{kUnits, static_cast<std::size_t>(state.range(0))};
  const auto r = sample_realization(s, 1);
  const UniformFieldSampler sampler(s, 0.0, 0.01, static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(r));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_ChirpSampler)->Args({4000, 20001})->Args({40000, 500001})->Unit(benchmark::kMillisecond);

void BM_Rk4Step(benchmark::State& state) {
  const auto pot = Potential::harmonic(1);
  TrajectoryState s{1.0, 0.0, 0.0};
  const StepDrive d{0.1, 0.2, 0.3};
  for (auto _ : state) {
    s = step(s, d, pot, kUnits, 0.02);
    if (s.t > 1e6) s = {1.0, 0.0, 0.0};
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Rk4Step);

void BM_Trajectory(benchmark::State& state) {
  const ZpfSpectrum s{kUnits, 40000};
  IntegrationConfig c;
  c.t_end = static_cast<double>(state.range(0));
  c.n_trajectories = 1;
  c.record_stride = 1250;
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_ensemble(InitialDistribution::point(0, 0), Potential::harmonic(1), kUnits, s, c));
}
BENCHMARK(BM_Trajectory)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_LocalMoments(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  EnsembleState e;
  for (long i = 0; i < state.range(0); ++i) {
    e.positions.push_back(n(rng));
    e.momenta.push_back(n(rng));
  }
  const Grid1D g(-8, 8, 1024);
  for (auto _ : state) benchmark::DoNotOptimize(local_moments(e, g, kUnits));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LocalMoments)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_CrankNicolson(benchmark::State& state) {
  const Grid1D g(-8, 8, static_cast<std::size_t>(state.range(0)));
  const auto psi = coherent_state(g, kUnits, 1.0, 1.0, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(psi, Potential::harmonic(1), kUnits, 1e-3, 100, 100));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_CrankNicolson)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_VariationalGroundState(benchmark::State& state) {
  const Grid1D g(-5, 5, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(variational_ground_state(Potential::quartic(1), g, kUnits));
}
BENCHMARK(BM_VariationalGroundState)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
