#include <benchmark/benchmark.h>

#include "gbdp/closedform.hpp"
#include "gbdp/extinction.hpp"
#include "gbdp/kolmogorov.hpp"
#include "gbdp/rng.hpp"
#include "gbdp/simulate.hpp"

using namespace gbdp;

static void BM_SimulateTrajectory(benchmark::State& state) {
  const auto spec = ModelSpec::linear({1.0, 0.5}, {0.5, 0.25});
  std::uint64_t r = 0;
  for (auto _ : state) {
    auto traj = simulate_trajectory(spec, 1, 1.0, derive_stream_seed(1, r++));
    benchmark::DoNotOptimize(traj.jump_times.data());
  }
}
BENCHMARK(BM_SimulateTrajectory);

static void BM_SolveStatePmf(benchmark::State& state) {
  const auto spec = ModelSpec::linear({1.0, 0.5}, {0.75});
  const double times[] = {1.0};
  for (auto _ : state) {
    auto out = solve_state_probabilities(spec, {{1, 1.0}}, times);
    benchmark::DoNotOptimize(out[0].probs.data());
  }
}
BENCHMARK(BM_SolveStatePmf);

static void BM_ConstantPmf(benchmark::State& state) {
  const auto spec = ModelSpec::constant({1.0, 0.5}, {0.5, 0.25});
  for (auto _ : state) {
    double total = 0.0;
    for (State n = 0; n <= 20; ++n) total += constant_pmf(spec, n, 1.0);
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_ConstantPmf);

static void BM_JointGrid(benchmark::State& state) {
  const auto spec = ModelSpec::linear({2.0}, {1.0});
  const double times[] = {1.0};
  for (auto _ : state) {
    auto out = solve_joint_full(spec, times);
    benchmark::DoNotOptimize(out[0].values.data());
  }
}
BENCHMARK(BM_JointGrid);

static void BM_HittingTimeLaplace(benchmark::State& state) {
  const auto spec = ModelSpec::linear({0.5}, {1.0});
  for (auto _ : state) {
    const double w = hitting_time_laplace(spec, 1, 1.0);
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_HittingTimeLaplace);

static void BM_MonteCarloMean(benchmark::State& state) {
  const auto spec = ModelSpec::linear({2.0}, {1.0});
  const double times[] = {1.0};
  for (auto _ : state) {
    auto mc = monte_carlo(spec, 1, 1.0, static_cast<std::size_t>(state.range(0)),
                          times, weight_population(), 42);
    benchmark::DoNotOptimize(mc.at[0].mean[0]);
  }
}
BENCHMARK(BM_MonteCarloMean)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
