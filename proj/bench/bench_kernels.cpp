#include <benchmark/benchmark.h>

#include <omp.h>

#include <vector>

#include "tcs/analysis.hpp"
#include "tcs/noise_mc.hpp"
#include "tcs/tdse.hpp"

namespace {

using namespace tcs;

// Threads for the OpenMP variants come from the benchmark argument.
void set_threads(const benchmark::State& state) { omp_set_num_threads(static_cast<int>(state.range(0))); }

void BM_ensemble_serial(benchmark::State& state) {
  const ExperimentPlan plan = fig2_plan();
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ensemble_serial(plan));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(plan.n_durations * plan.n_reps));
}

void BM_ensemble_omp(benchmark::State& state) {
  set_threads(state);
  const ExperimentPlan plan = fig2_plan();
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ensemble(plan));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(plan.n_durations * plan.n_reps));
}

ExperimentPlan accuracy_plan() { return table1_plan(table1_rows()[5]); }

void BM_accuracy_serial(benchmark::State& state) {
  const ExperimentPlan plan = accuracy_plan();
  for (auto _ : state) benchmark::DoNotOptimize(relative_accuracy_serial(plan, 8));
}

void BM_accuracy_omp(benchmark::State& state) {
  set_threads(state);
  const ExperimentPlan plan = accuracy_plan();
  for (auto _ : state) benchmark::DoNotOptimize(relative_accuracy(plan, 8));
}

std::vector<tdse::TrapProtocol> sweep_protocols() {
  std::vector<tdse::TrapProtocol> ps;
  for (double g : {0.0, 2.5, 5.0, 9.81}) {
    tdse::TrapProtocol p = tdse::default_protocol();
    p.t_split = 0.005;
    p.gravity = g > 0;
    p.g = g;
    ps.push_back(p);
  }
  return ps;
}

void BM_tdse_sweep_serial(benchmark::State& state) {
  const auto ps = sweep_protocols();
  for (auto _ : state) benchmark::DoNotOptimize(tdse::sweep_final_populations_serial(ps, 256));
}

void BM_tdse_sweep_omp(benchmark::State& state) {
  set_threads(state);
  const auto ps = sweep_protocols();
  for (auto _ : state) benchmark::DoNotOptimize(tdse::sweep_final_populations(ps, 256));
}

void thread_args(benchmark::internal::Benchmark* b) {
  for (int t = 1; t <= omp_get_num_procs(); t *= 2) b->Arg(t);
}

}  // namespace

BENCHMARK(BM_ensemble_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ensemble_omp)->Apply(thread_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_accuracy_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_accuracy_omp)->Apply(thread_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_tdse_sweep_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_tdse_sweep_omp)->Apply(thread_args)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
