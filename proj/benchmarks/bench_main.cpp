#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "gcabulf/dwt.hpp"
#include "gcabulf/filtering.hpp"
#include "gcabulf/grouping.hpp"
#include "gcabulf/layers.hpp"
#include "gcabulf/synth.hpp"

using namespace gcabulf;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(1.0, 0.5);
  std::vector<double> x(n);
  for (auto& v : x) v = std::abs(g(rng));
  return x;
}

void BM_Decompose(benchmark::State& state, WaveletFamily family) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(x, family));
  state.SetComplexityN(state.range(0));
}
BENCHMARK_CAPTURE(BM_Decompose, haar, WaveletFamily::Haar)->RangeMultiplier(4)->Range(16, 4096)->Complexity();
BENCHMARK_CAPTURE(BM_Decompose, db4, WaveletFamily::Db4)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_CausalBandWindow(benchmark::State& state) {
  const auto x = noise(1024, 2);
  const LoadSeries s(TimeIndex{0, kSecondsPerHour, x.size()}, x);
  const auto buffer = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(causal_band_window(s, 1000, 12, buffer));
}
BENCHMARK(BM_CausalBandWindow)->Arg(32)->Arg(128)->Arg(512);

void BM_LstmForward(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  LstmFcNet net(LstmFcShape{5, hidden, kContextDim, {64, 32}, GateActivation::Sigmoid, LstmReadout::OutputGate});
  Rng rng(3);
  net.init(rng);
  const auto window = noise(12 * 5, 4);
  const std::vector<double> ctx(kContextDim, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(window, 12, ctx));
}
BENCHMARK(BM_LstmForward)->Arg(16)->Arg(64);

void BM_LstmForwardBackward(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  LstmFcNet net(LstmFcShape{5, hidden, kContextDim, {64, 32}, GateActivation::Sigmoid, LstmReadout::OutputGate});
  Rng rng(3);
  net.init(rng);
  const auto window = noise(12 * 5, 4);
  const std::vector<double> ctx(kContextDim, 0.0);
  LstmFcNet::Trace trace;
  for (auto _ : state) {
    net.forward(window, 12, ctx, &trace);
    net.backward(trace, 0.1);
  }
}
BENCHMARK(BM_LstmForwardBackward)->Arg(16)->Arg(64);

void BM_LagCorrelation(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.2);
  std::vector<double> x(m), y(m);
  for (std::size_t t = 0; t < m; ++t) {
    x[t] = coin(rng) ? 1.0 : 0.0;
    y[t] = coin(rng) ? 1.0 : 0.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(lag_correlation_scan(x, y, 6));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LagCorrelation)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_ContributionRank(benchmark::State& state) {
  const auto panel = generate_preset("bottom-up-60d").panel;
  for (auto _ : state) benchmark::DoNotOptimize(contribution_rank(panel, 0.5, 24));
}
BENCHMARK(BM_ContributionRank);

}  // namespace

BENCHMARK_MAIN();
