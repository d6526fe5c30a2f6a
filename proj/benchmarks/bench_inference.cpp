#include <benchmark/benchmark.h>

#include <memory>

#include "softdd/chain_model.hpp"
#include "softdd/constraints.hpp"
#include "softdd/dd.hpp"
#include "softdd/rng.hpp"

namespace {

using namespace softdd;

std::shared_ptr<const LabelSchema> bench_schema() {
  return std::make_shared<const LabelSchema>(LabelSchema::from_labels({
      "O", "B-a", "I-a", "B-b", "I-b", "B-c", "B-d", "I-d", "B-e", "B-f", "I-f", "B-g",
  }));
}

ScoreTable random_table(const LabelSchema& schema, std::size_t length, Rng& rng) {
  ScoreTable table;
  table.length = length;
  table.num_labels = schema.size();
  table.unary.resize(length * schema.size());
  table.transition.resize(static_cast<std::size_t>(schema.size()) * schema.size());
  for (double& v : table.unary) v = rng.uniform_real(-2.0, 2.0);
  for (double& v : table.transition) v = rng.uniform_real(-1.0, 1.0);
  table.mask = schema.transition_mask();
  table.start_valid = schema.start_mask();
  return table;
}

void BM_Viterbi(benchmark::State& state) {
  auto schema = bench_schema();
  Rng rng(11);
  ScoreTable table = random_table(*schema, static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) {
    ViterbiResult res = viterbi(table);
    benchmark::DoNotOptimize(res.objective);
  }
}
BENCHMARK(BM_Viterbi)->Arg(16)->Arg(64)->Arg(256);

void BM_SoftDD(benchmark::State& state) {
  auto schema = bench_schema();
  Rng rng(13);
  ScoreTable table = random_table(*schema, 32, rng);
  ConstraintSet set(schema);
  set.add_singleton();
  set.add_pairwise();
  std::vector<double> penalties(set.size());
  for (double& p : penalties) p = rng.uniform_real(0.0, 2.0);
  set.set_penalties(penalties);

  DDOptions options;
  options.max_iters = static_cast<int>(state.range(0));
  for (auto _ : state) {
    PredictionResult res = soft_dd(table, set, options);
    benchmark::DoNotOptimize(res.primal);
  }
}
BENCHMARK(BM_SoftDD)->Arg(1)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
