// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <random>

#include "netreg/adjacency.hpp"
#include "netreg/codegree.hpp"
#include "netreg/graphon.hpp"
#include "netreg/lemmas.hpp"

namespace {

netreg::AdjacencyMatrix random_graph(std::size_t n, double p) {
  std::mt19937_64 rng(n);
  std::bernoulli_distribution link(p);
  netreg::AdjacencyMatrix d(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) d.set_edge(i, j, link(rng));
  }
  return d;
}

void BM_SquaredAdjacencyReference(benchmark::State& state) {
  const auto d = random_graph(static_cast<std::size_t>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(netreg::reference::squared_adjacency(d));
  state.SetComplexityN(state.range(0));
}

void BM_SquaredAdjacencyPacked(benchmark::State& state) {
  const auto d = random_graph(static_cast<std::size_t>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(netreg::squared_adjacency(d));
  state.SetComplexityN(state.range(0));
}

void BM_DistancesReference(benchmark::State& state) {
  const auto d = random_graph(static_cast<std::size_t>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(netreg::reference::distance_matrix(d));
}

void BM_DistancesFast(benchmark::State& state) {
  const auto d = random_graph(static_cast<std::size_t>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(netreg::distance_matrix_fast(d));
}

void BM_Lemma1Sweep(benchmark::State& state) {
  const auto spec = netreg::GraphonSpec::homophily();
  const auto grid = netreg::default_grid(spec);
  const auto pairs = netreg::lattice_pairs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(netreg::verify_lemma1(spec, pairs, grid));
}

}  // namespace

BENCHMARK(BM_SquaredAdjacencyReference)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SquaredAdjacencyPacked)->RangeMultiplier(2)->Range(64, 2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistancesReference)->DenseRange(20, 60, 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistancesFast)->DenseRange(20, 60, 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistancesFast)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Lemma1Sweep)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
