#include <benchmark/benchmark.h>

#include <random>

#include "autog/graph.hpp"
#include "autog/join_discovery.hpp"
#include "autog/oracle.hpp"
#include "autog/profile.hpp"
#include "autog/synth.hpp"
#include "autog/util.hpp"

using namespace autog;

namespace {

SynthDataset planted_dataset() {
  BenchSpec spec;
  spec.seed = 1;
  spec.n_papers = 400;
  spec.n_authors = 120;
  auto dataset = generate(spec);
  std::vector<Action> actions;
  for (const auto& keyed : dataset.key.actions) actions.push_back(keyed.action);
  auto result = apply_script(dataset.db, actions);
  dataset.db = std::move(result.after);
  return dataset;
}

void BM_SchemaRoundTrip(benchmark::State& state) {
  const auto dataset = planted_dataset();
  const auto text = serialize_schema(dataset.db.schema);
  for (auto _ : state) {
    auto schema = parse_schema(text);
    benchmark::DoNotOptimize(serialize_schema(schema));
  }
}
BENCHMARK(BM_SchemaRoundTrip);

void BM_ProfileDataset(benchmark::State& state) {
  const auto dataset = planted_dataset();
  for (auto _ : state) {
    benchmark::DoNotOptimize(profile_dataset(dataset.db.schema, dataset.db.tables, 5, 0));
  }
}
BENCHMARK(BM_ProfileDataset);

void BM_RankPairs(benchmark::State& state) {
  const auto dataset = planted_dataset();
  const auto profiles = profile_dataset(dataset.db.schema, dataset.db.tables, 5, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank_pairs(dataset.db.schema, profiles, &dataset.db.tables,
                                        SimilarityMethod::kEmbedding, 20));
  }
}
BENCHMARK(BM_RankPairs);

void BM_BuildGraph(benchmark::State& state) {
  const auto dataset = planted_dataset();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_graph(dataset.db, BuildMode::kRow2NodeEdge));
  }
}
BENCHMARK(BM_BuildGraph);

void BM_LabelProp(benchmark::State& state) {
  const auto dataset = planted_dataset();
  const auto graph = build_graph(dataset.db, BuildMode::kRow2NodeEdge);
  Task task = dataset.tasks[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(label_prop_score(graph, task, {2, 1.0, 20}));
  }
}
BENCHMARK(BM_LabelProp);

void BM_KendallDistance(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<std::string> a, b;
  for (int i = 0; i < 64; ++i) a.push_back("cand" + std::to_string(i));
  b = a;
  shuffle_inplace(b, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kendall_tau_distance(a, b));
  }
}
BENCHMARK(BM_KendallDistance);

}  // namespace

BENCHMARK_MAIN();
