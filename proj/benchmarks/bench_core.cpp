#include <benchmark/benchmark.h>

#include "multicat/master_eq.hpp"
#include "multicat/protocol.hpp"
#include "multicat/qfi.hpp"

using namespace multicat;

namespace {

void BM_ExactSymRecursion(benchmark::State& state) {
  const int cycles = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(avg_qfi_exact_sym(0.05, 0.5, 10, cycles));
  }
  state.SetItemsProcessed(state.iterations() * cycles);
}
BENCHMARK(BM_ExactSymRecursion)->Arg(1000)->Arg(5000);

void BM_ExactNonsymRecursion(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::vector<double> couplings;
  for (int k = 0; k < m; ++k) couplings.push_back(0.05 + 0.002 * k);
  for (auto _ : state) {
    benchmark::DoNotOptimize(avg_qfi_exact_nonsym(couplings, 0.5, 500));
  }
  state.SetItemsProcessed(state.iterations() * 500 * m * (m - 1) / 2);
}
BENCHMARK(BM_ExactNonsymRecursion)->Arg(4)->Arg(8)->Arg(16);

void BM_SampleTrajectoryDicke(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const ProtocolParams params = ProtocolParams::uniform(m, 0.05, 0.5);
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_trajectory(params, 200, 7, stream++));
  }
}
BENCHMARK(BM_SampleTrajectoryDicke)->Arg(4)->Arg(32)->Arg(128);

void BM_SampleTrajectoryFull(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  ProtocolParams params;
  params.num_spins = m;
  params.phi = 0.5;
  for (int k = 0; k < m; ++k) params.couplings.push_back(0.05 + 0.001 * k);
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_trajectory(params, 200, 7, stream++));
  }
}
BENCHMARK(BM_SampleTrajectoryFull)->Arg(4)->Arg(8)->Arg(12);

void BM_BruteEnumeration(benchmark::State& state) {
  const ProtocolParams params = ProtocolParams::uniform(4, 0.05, 0.5);
  const int cycles = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(avg_qfi_brute(params, cycles));
  }
}
BENCHMARK(BM_BruteEnumeration)->Arg(8)->Arg(10);

void BM_IntegrateDicke(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const LindbladParams params = LindbladParams::from_cycle(0.05, 0.5, 1.0);
  const auto rho0 = DensityOperator::pure(scs_state({0.5 * M_PI, 0.0}, m, Repr::Dicke));
  const double t_final = 50.0;
  const int steps = default_steps(params, t_final);
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(rho0, params, t_final, steps, steps));
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_IntegrateDicke)->Arg(4)->Arg(16)->Arg(32);

void BM_IntegrateFullDisordered(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const LindbladParams params = LindbladParams::from_disorder(0.05, 0.5, 0.01, m, 1.0);
  const auto rho0 = DensityOperator::pure(scs_state({0.5 * M_PI, 0.0}, m, Repr::FullTensor));
  const double t_final = 10.0;
  const int steps = default_steps(params, t_final);
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(rho0, params, t_final, steps, steps));
  }
}
BENCHMARK(BM_IntegrateFullDisordered)->Arg(3)->Arg(5);

} // namespace

BENCHMARK_MAIN();
