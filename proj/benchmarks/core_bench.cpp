#include <benchmark/benchmark.h>

#include <random>

#include "dronefleet/bench.hpp"
#include "dronefleet/costs.hpp"
#include "dronefleet/fleet.hpp"
#include "dronefleet/optimizer.hpp"
#include "dronefleet/qlearning.hpp"
#include "dronefleet/scenario.hpp"

using namespace dronefleet;

namespace {

std::vector<DroneTrajectory> env1_trajectories(std::uint64_t seed) {
  const Scenario s = builtin_scenario("env1");
  std::mt19937_64 rng(seed);
  std::vector<DroneTrajectory> ts;
  for (const auto& start : s.drone_starts) {
    std::vector<Eigen::Vector2d> controls(static_cast<std::size_t>(s.horizon));
    for (auto& u : controls) {
      u = {static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5,
           static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5};
    }
    ts.push_back(rollout(s.A, s.B, start, controls));
  }
  return ts;
}

}  // namespace

static void BM_TotalCostEnv1(benchmark::State& state) {
  const Scenario s = builtin_scenario("env1");
  const auto ts = env1_trajectories(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(total_cost(s, ts, s.lambda));
  }
}
BENCHMARK(BM_TotalCostEnv1);

static void BM_GradTotalCostEnv1(benchmark::State& state) {
  const Scenario s = builtin_scenario("env1");
  const auto ts = env1_trajectories(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(grad_total_cost(s, ts, s.lambda));
  }
}
BENCHMARK(BM_GradTotalCostEnv1);

static void BM_OptimizeEnv1(benchmark::State& state) {
  const Scenario s = builtin_scenario("env1");
  OptimizerConfig config;
  config.max_iterations = static_cast<int>(state.range(0));
  config.convergence_epsilon = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize(s, config));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OptimizeEnv1)->Arg(10)->Arg(100)->Complexity(benchmark::oN);

static void BM_SelectFleetEnv2(benchmark::State& state) {
  const Scenario s = builtin_scenario("env2");
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_fleet(s, s.lambda));
  }
}
BENCHMARK(BM_SelectFleetEnv2);

static void BM_TrainIqlEnv1(benchmark::State& state) {
  const GridMDP mdp = discretize(builtin_scenario("env1"));
  TrainConfig config;
  config.episodes = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(mdp, Method::iql, config));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TrainIqlEnv1)->Arg(50)->Arg(200)->Complexity(benchmark::oN);

BENCHMARK_MAIN();
