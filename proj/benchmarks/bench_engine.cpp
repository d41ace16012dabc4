#include <benchmark/benchmark.h>

#include "emotrust/affect.hpp"
#include "emotrust/engine.hpp"
#include "emotrust/experiment.hpp"

using namespace emotrust;

static void BM_EmotionIntensity(benchmark::State& state) {
  const affect::AffectParams params;
  affect::PadState pad{0.1, 0.2, -0.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(affect::mood(pad, params));
    pad.pleasure = -pad.pleasure;
  }
}
BENCHMARK(BM_EmotionIntensity);

static void BM_SingleRun(benchmark::State& state) {
  SimConfig config;
  config.scenario = static_cast<Scenario>(state.range(0));
  config.check_invariants = false;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    config.seed = seed++;
    benchmark::DoNotOptimize(run(config, false));
  }
}
BENCHMARK(BM_SingleRun)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

static void BM_SingleRunWithLog(benchmark::State& state) {
  SimConfig config;
  config.check_invariants = false;
  for (auto _ : state) benchmark::DoNotOptimize(run(config, true));
}
BENCHMARK(BM_SingleRunWithLog)->Unit(benchmark::kMicrosecond);

static void BM_IdleSweepSlice(benchmark::State& state) {
  harness::ExperimentSpec spec;
  spec.replications = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_experiment(spec, 1));
}
BENCHMARK(BM_IdleSweepSlice)->Arg(5)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
