#include <benchmark/benchmark.h>

#include "csgd/dataset.hpp"
#include "csgd/engine.hpp"
#include "csgd/problem.hpp"
#include "csgd/schedule.hpp"

namespace {

using namespace csgd;

ScheduleSet bench_schedule(long cap) {
  ScheduleSet s;
  s.alpha = 0.02;
  s.batch_cap = cap;
  return s;
}

void BM_LeastSquaresBatch(benchmark::State& state) {
  const Problem p = Problem::least_squares(10, 10, 7, 0.01);
  const Vec x(10, 0.25);
  const long batch = state.range(0);
  long iteration = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(p.sample_gradient(0, x, batch, 1, iteration++));
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_LeastSquaresBatch)->Arg(16)->Arg(128)->Arg(512);

void BM_LogisticFullGradient(benchmark::State& state) {
  const Problem p =
      Problem::logistic(synthetic_logistic(1000, 10, 7), 10, 5e-4, 7);
  const Vec x(10, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(p.full_gradient(x));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_LogisticFullGradient);

void BM_EngineRounds(benchmark::State& state) {
  const Problem p = Problem::least_squares(10, 10, 7, 0.01);
  const ScheduleSet s = bench_schedule(state.range(0));
  RunSettings st;
  st.iterations = 50;
  st.metrics_every = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(p, s, st));
  }
  state.SetItemsProcessed(state.iterations() * st.iterations);
}
BENCHMARK(BM_EngineRounds)->Arg(32)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
