#include <benchmark/benchmark.h>

#include "pcl/dynamics.hpp"
#include "pcl/experiments.hpp"
#include "pcl/markov.hpp"
#include "pcl/observables.hpp"
#include "pcl/trajectory.hpp"

using namespace pcl;

static void BM_StepScalar(benchmark::State& state) {
  RngStream rng(1);
  auto x = init_uniform(rng, IntervalDomain{}, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(step_scalar(rng, x));
}
BENCHMARK(BM_StepScalar)->Arg(10)->Arg(1000);

static void BM_StepVector(benchmark::State& state) {
  RngStream rng(1);
  auto x = init_uniform(rng, BoxDomain{0.0, 1.0, static_cast<std::size_t>(state.range(1))},
                        static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(step_vector(rng, x));
}
BENCHMARK(BM_StepVector)->Args({100, 2})->Args({100, 4});

static void BM_StepCircle(benchmark::State& state) {
  RngStream rng(1);
  auto theta = init_uniform_circle(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(step_circle(rng, theta));
}
BENCHMARK(BM_StepCircle)->Arg(10)->Arg(1000);

static void BM_CircularGaps(benchmark::State& state) {
  RngStream rng(2);
  const auto theta = init_uniform_circle(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(circular_gaps(theta).gamma_max);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CircularGaps)->Range(8, 4096)->Complexity();

static void BM_ScalarTrajectory(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RngStream rng(seed++);
    auto x = init_uniform(rng, IntervalDomain{}, n);
    TrajectoryOptions<ScalarState> opts;
    opts.policies = {RangeThreshold{1e-3}};
    benchmark::DoNotOptimize(run_scalar_trajectory(rng, x, opts).steps);
  }
}
BENCHMARK(BM_ScalarTrajectory)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

static void BM_CircleTrajectory(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RngStream rng(seed++);
    auto theta = init_uniform_circle(rng, n);
    TrajectoryOptions<AngularState> opts;
    opts.policies = {HalfDisk{}, CircleArc{1e-2}};
    benchmark::DoNotOptimize(run_circle_trajectory(rng, theta, opts).steps);
  }
}
BENCHMARK(BM_CircleTrajectory)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

static void BM_AbsorptionClosedForm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(absorption_closed_form(n, 0.1).log10);
}
BENCHMARK(BM_AbsorptionClosedForm)->Arg(10)->Arg(500);

static void BM_AbsorptionSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(absorption_solve(n, 0.1).expected[0]);
}
BENCHMARK(BM_AbsorptionSolve)->Arg(10)->Arg(500);

static void BM_ExperimentCell(benchmark::State& state) {
  ExperimentConfig c;
  c.n_grid = {10};
  c.eps_grid = {1e-2};
  c.trials = 100;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c, 1).aggregates[0].t_hat.mean);
}
BENCHMARK(BM_ExperimentCell)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
