#include <benchmark/benchmark.h>

#include "misnc/instance.hpp"
#include "misnc/mincost.hpp"
#include "misnc/network.hpp"
#include "misnc/offline.hpp"
#include "misnc/online.hpp"

using namespace misnc;

static void BM_MaxFlowButterfly(benchmark::State& state) {
  auto [net, requests] = build_extended_butterfly(150.0);
  std::vector<double> caps(16, 2.0 / 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(max_flow(net, 0, net.node_index("8"), caps));
}
BENCHMARK(BM_MaxFlowButterfly);

static void BM_MincostExactCold(benchmark::State& state) {
  auto [net, requests] = build_extended_butterfly(150.0);
  PriceSystem unit = PriceSystem::uniform(net, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(mincost_exact(net, requests[0], unit).cost);
}
BENCHMARK(BM_MincostExactCold)->Unit(benchmark::kMicrosecond);

static void BM_MincostWarmRestart(benchmark::State& state) {
  auto [net, requests] = build_extended_butterfly(150.0);
  MincostSolver solver(net);
  PriceSystem prices = PriceSystem::uniform(net, 1.0);
  solver.exact(requests[0], prices);
  size_t bump = 0;
  for (auto _ : state) {
    prices.values[bump % prices.values.size()] *= 1.01;  // mimic a primal-dual update
    ++bump;
    benchmark::DoNotOptimize(solver.exact(requests[0], prices).cost);
  }
}
BENCHMARK(BM_MincostWarmRestart)->Unit(benchmark::kMicrosecond);

static void BM_FptasEpsPoint4(benchmark::State& state) {
  auto [net, requests] = build_extended_butterfly(150.0);
  FptasParams params = params_from_epsilon(0.4, net.link_count());
  FptasOptions options;
  options.record_trace = false;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_fptas(net, requests, params, options).lambda);
}
BENCHMARK(BM_FptasEpsPoint4)->Unit(benchmark::kMillisecond);

static void BM_OnlineTracePhi1(benchmark::State& state) {
  auto [net, requests] = build_extended_butterfly(1.5);
  auto trace = generate_online_trace(1, 100, 1.5);
  for (auto _ : state) {
    OnlineConfig cfg;
    cfg.phi = 1.0;
    OnlineRouter router(net, cfg);
    for (const auto& r : trace) router.process(r);
    benchmark::DoNotOptimize(router.metrics().violation_ratio);
  }
}
BENCHMARK(BM_OnlineTracePhi1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
