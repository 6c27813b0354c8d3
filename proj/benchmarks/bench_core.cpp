#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "evochain/cpm.hpp"
#include "evochain/dataset.hpp"
#include "evochain/graph.hpp"
#include "evochain/learn/evaluation.hpp"
#include "evochain/learn/model.hpp"
#include "evochain/metrics.hpp"
#include "evochain/random.hpp"

namespace {

using namespace evochain;

SnapshotGraph random_graph(std::size_t nodes, double p, std::uint64_t seed) {
  Rng rng(seed);
  GraphBuilder builder;
  auto name = [](std::size_t i) { return "n" + std::to_string(100000 + i); };
  for (std::size_t i = 0; i < nodes; ++i) builder.add_node(name(i));
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = 0; j < nodes; ++j) {
      if (i != j && uniform01(rng) < p) builder.add_arc(name(i), name(j), 1.0 + static_cast<double>(uniform_index(rng, 4)));
    }
  }
  return builder.build();
}

// Dense blocks of `block` nodes with sparse links between them.
SnapshotGraph block_graph(std::size_t blocks, std::size_t block, std::uint64_t seed) {
  Rng rng(seed);
  GraphBuilder builder;
  const std::size_t nodes = blocks * block;
  auto name = [](std::size_t i) { return "n" + std::to_string(100000 + i); };
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = 0; j < nodes; ++j) {
      if (i == j) continue;
      const double p = i / block == j / block ? 0.9 : 0.002;
      if (uniform01(rng) < p) builder.add_arc(name(i), name(j));
    }
  }
  return builder.build();
}

Dataset random_dataset(std::size_t rows, std::size_t features, std::size_t classes, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  for (std::size_t f = 0; f < features; ++f) d.features.push_back({"f" + std::to_string(f)});
  for (std::size_t c = 0; c < classes; ++c) d.classes.push_back("c" + std::to_string(c));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t label = uniform_index(rng, classes);
    std::vector<double> row(features);
    for (std::size_t f = 0; f < features; ++f) {
      row[f] = uniform01(rng) + (f < 3 ? static_cast<double>(label) * 0.5 : 0.0);
    }
    d.rows.push_back(std::move(row));
    d.labels.push_back(label);
  }
  return d;
}

void BM_Betweenness(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 0.05, 1);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::betweenness(g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Betweenness)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void BM_Closeness(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 0.05, 2);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::closeness(g));
}
BENCHMARK(BM_Closeness)->RangeMultiplier(2)->Range(64, 512);

void BM_SocialPosition(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 0.05, 3);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::social_position(g, 0.9));
}
BENCHMARK(BM_SocialPosition)->RangeMultiplier(2)->Range(64, 512);

void BM_CliquePercolation(benchmark::State& state) {
  const auto g = block_graph(static_cast<std::size_t>(state.range(0)), 12, 4);
  for (auto _ : state) benchmark::DoNotOptimize(cpm::detect_communities(g, 3, 0));
}
BENCHMARK(BM_CliquePercolation)->RangeMultiplier(2)->Range(4, 32);

void BM_CrossValidate(benchmark::State& state, learn::ModelKind kind) {
  const auto d = random_dataset(static_cast<std::size_t>(state.range(0)), 30, 4, 5);
  learn::ModelParams params;
  params.kind = kind;
  params.n_trees = 20;
  for (auto _ : state) benchmark::DoNotOptimize(learn::cross_validate(d, params, {10, 1, false}));
}
BENCHMARK_CAPTURE(BM_CrossValidate, tree, learn::ModelKind::tree)->Arg(500)->Arg(2000);
BENCHMARK_CAPTURE(BM_CrossValidate, forest, learn::ModelKind::forest)->Arg(500)->Arg(2000);
BENCHMARK_CAPTURE(BM_CrossValidate, adaboost, learn::ModelKind::adaboost)->Arg(500);
BENCHMARK_CAPTURE(BM_CrossValidate, bagging, learn::ModelKind::bagging)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
