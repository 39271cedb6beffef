#include "comac/power.hpp"
#include "comac/rates.hpp"

#include <benchmark/benchmark.h>

using namespace comac;

namespace {

SimParams scenario(int K, int M, int N, std::uint64_t trials) {
  SimParams p;
  p.K = K;
  p.M = M;
  p.N = N;
  p.power = db_to_linear(10.0);
  p.trials = trials;
  p.gamma_trials = 20000;
  return p;
}

void BM_GammaProfile(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_gamma_profile(K, 10000, 1).value.data());
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_GammaProfile)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SfaAvg(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const auto p = scenario(K, K / 8, 16, 1000);
  cached_gamma_profile(K, p.gamma_trials, p.seed);
  for (auto _ : state) benchmark::DoNotOptimize(rate_sfa_avg(p).mean);
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SfaAvg)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SfaAvgProfile(benchmark::State& state) {
  const auto p = scenario(128, 128, 16, 1000);
  const auto ms = divisors(128);
  cached_gamma_profile(128, p.gamma_trials, p.seed);
  for (auto _ : state) benchmark::DoNotOptimize(rate_sfa_avg_profile(p, ms).size());
}
BENCHMARK(BM_SfaAvgProfile)->Unit(benchmark::kMillisecond);

void BM_SpongeSqueeze(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const int N = static_cast<int>(state.range(1));
  const auto p = scenario(K, K / 4, N, 1);
  Engine e = make_engine(1, Stream::Selftest, 0);
  GainMatrix g(K, N);
  draw_gains(e, g.data());
  const auto omega = build_assignment(g, p.M);
  for (auto _ : state) benchmark::DoNotOptimize(sponge_squeeze(g, omega, p).objective);
}
BENCHMARK(BM_SpongeSqueeze)->Args({16, 8})->Args({64, 16})->Args({128, 16})->Unit(benchmark::kMicrosecond);

void BM_OracleSolve(benchmark::State& state) {
  const auto p = scenario(6, 2, 8, 1);
  Engine e = make_engine(1, Stream::Selftest, 1);
  GainMatrix g(6, 8);
  draw_gains(e, g.data());
  const auto omega = build_assignment(g, 2);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_solve(g, omega, p).objective);
}
BENCHMARK(BM_OracleSolve)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
