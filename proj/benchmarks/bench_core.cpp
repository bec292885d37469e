#include <benchmark/benchmark.h>

#include <random>

#include "ensmot/assignment.hpp"
#include "ensmot/kalman.hpp"
#include "ensmot/scenario.hpp"
#include "ensmot/tracker.hpp"

using namespace ensmot;

static void BM_SolveAssignment(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  CostMatrix costs(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) costs(r, c) = u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(costs));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveAssignment)->RangeMultiplier(2)->Range(4, 64)->Complexity();

static void BM_KalmanPredictUpdate(benchmark::State& state) {
  const MotionModel model;
  auto s = initiate(Detection(1, BoundingBox(100, 100, 40, 90), 0.9), model);
  const Detection d(2, BoundingBox(101, 100, 40, 90), 0.9);
  for (auto _ : state) {
    s = update(predict(s, model, 1), d, model);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_KalmanPredictUpdate);

static void BM_RunSequence(benchmark::State& state) {
  ScenarioSpec spec;
  spec.num_objects = static_cast<int>(state.range(0));
  spec.num_frames = 500;
  spec.rng_seed = 3;
  spec.detectors = {DetectorSpec{"a", 2, 0, 0.1, 0.5, 2.0}, DetectorSpec{"b", 2, 1, 0.1, 0.5, 2.0}};
  const auto schedule = make_schedule(generate_scenario(spec));
  const TrackerConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(run_sequence(schedule, 1, spec.num_frames, config));
  state.SetItemsProcessed(state.iterations() * spec.num_frames);
}
BENCHMARK(BM_RunSequence)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
