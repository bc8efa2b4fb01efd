#include "exdag/balance.hpp"
#include "exdag/evaluation.hpp"
#include "exdag/generators.hpp"
#include "exdag/log_weight.hpp"
#include "exdag/restructure.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

exdag::ExpressionDag make(exdag::Shape shape, int n) {
  exdag::GeneratorSpec spec;
  spec.shape = shape;
  spec.n = n;
  spec.seed = 42;
  return exdag::generate(spec);
}

void bm_log_add(benchmark::State &state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> gap(0.0, 40.0);
  std::vector<double> gaps(1024);
  for (double &g : gaps) {
    g = gap(rng);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const double g = gaps[i++ & 1023];
    benchmark::DoNotOptimize(exdag::log_add({10.0}, {10.0 - g}));
  }
}
BENCHMARK(bm_log_add);

void bm_full_count(benchmark::State &state) {
  const auto dag = make(exdag::Shape::shared, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(exdag::full_count_weights(dag));
  }
}
BENCHMARK(bm_full_count)->Arg(1 << 10)->Arg(1 << 13);

void bm_restructure(benchmark::State &state) {
  const auto dag = make(exdag::Shape::list, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        exdag::restructure(dag, exdag::WeightPolicy::unit).depth_after);
  }
}
BENCHMARK(bm_restructure)->Arg(1 << 8)->Arg(1 << 11)->Unit(benchmark::kMillisecond);

void bm_evaluate(benchmark::State &state, exdag::ErrorPolicy policy) {
  const auto base = make(exdag::Shape::list, static_cast<int>(state.range(0)));
  exdag::EvalOptions opts;
  opts.policy = policy;
  opts.mark_evaluated = false;
  for (auto _ : state) {
    exdag::ExpressionDag dag = base;
    benchmark::DoNotOptimize(exdag::evaluate(dag, -2000, opts).report.total_cost);
  }
}
BENCHMARK_CAPTURE(bm_evaluate, def, exdag::ErrorPolicy::def)
    ->Arg(1 << 8)->Arg(1 << 10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_evaluate, ebc, exdag::ErrorPolicy::ebc)
    ->Arg(1 << 8)->Arg(1 << 10)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
