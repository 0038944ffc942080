#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "urllc/fbl_optimizer.hpp"
#include "urllc/matching.hpp"
#include "urllc/noma_solver.hpp"
#include "urllc/sim_engine.hpp"
#include "urllc/target_optimizer.hpp"

using namespace urllc;

static void BM_JointPowerMin(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<PairUser, PairUser>> cases;
  for (int i = 0; i < 64; ++i) {
    const double d1 = 20 + 100 * u(gen), d2 = 20 + 100 * u(gen);
    cases.push_back({{1.0, 0.189, d1 * d1, 1.0}, {1.0, 0.189, d2 * d2, 1.0}});
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = cases[i++ % cases.size()];
    benchmark::DoNotOptimize(joint_power_min(a, b, 1.23e-16));
  }
}
BENCHMARK(BM_JointPowerMin);

static void BM_SelectPairs(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PairEdge> edges;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j) edges.push_back({i, j, u(gen)});
  for (auto _ : state) benchmark::DoNotOptimize(select_pairs(n, edges, n / 2));
}
BENCHMARK(BM_SelectPairs)->Arg(8)->Arg(14)->Arg(20);

static void BM_CcTargets(benchmark::State& state) {
  const auto L = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cc_optimal_targets_uncached(L, 1e-5));
}
BENCHMARK(BM_CcTargets)->Arg(1)->Arg(2)->Arg(4);

static void BM_IrInitialSearch(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ir_initial_search_uncached(1.0, 1e-5));
}
BENCHMARK(BM_IrInitialSearch)->Unit(benchmark::kMillisecond);

static void BM_PowerCurve(benchmark::State& state) {
  const auto rem = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_power_curve({rem, 1.0, 50, 1e-5, 1e-6}));
}
BENCHMARK(BM_PowerCurve)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_SimulationPhase(benchmark::State& state) {
  SystemConfig cfg;
  cfg.activation_prob = 8.0 / cfg.n_users;
  cfg.access_mode = state.range(0) ? AccessMode::noma : AccessMode::oma;
  Simulation sim(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
}
BENCHMARK(BM_SimulationPhase)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
