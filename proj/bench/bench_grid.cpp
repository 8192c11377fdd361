#include <benchmark/benchmark.h>

#include "rmtlab/grid.hpp"
#include "rmtlab/harness.hpp"
#include "rmtlab/limit_kernels.hpp"
#include "rmtlab/orthopoly.hpp"

using namespace rmtlab;

namespace {

Exec exec_arg(benchmark::State& state) {
  const Exec e = state.range(0) == 0 ? Exec::serial : Exec::parallel;
  state.SetLabel(e == Exec::serial ? "serial" : "parallel");
  return e;
}

const HastingsMcLeodSolution& hm() {
  static const auto sol = [] {
    HastingsMcLeodOptions o;
    o.s_min = -40.0;
    return solve_hastings_mcleod(o);
  }();
  return sol;
}

void BM_FiniteKernelGrid(benchmark::State& state) {
  const Exec exec = exec_arg(state);
  const Potential p({0.0, 0.0, -1.0, 0.0, 0.25});
  const int n = 80;
  const auto tab = build_recurrence(p, n, n);
  const auto grid = tensor_grid(-2.0, 2.0, 33);
  for (auto _ : state) {
    auto k = eval_grid([&](double u, double v) { return scaled_critical_kernel(tab, p, n, 0.0, 0.25, u, v); }, grid,
                       exec);
    benchmark::DoNotOptimize(k.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size()));
}
BENCHMARK(BM_FiniteKernelGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CritRatioGrid(benchmark::State& state) {
  const Exec exec = exec_arg(state);
  const CritKernelContext ctx(hm(), 0.5);
  const auto grid = tensor_grid(-3.0, 3.0, 7);
  for (auto _ : state) {
    auto k = k_crit_grid(ctx, grid, exec);
    benchmark::DoNotOptimize(k.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size()));
}
BENCHMARK(BM_CritRatioGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CritIntegralGrid(benchmark::State& state) {
  const Exec exec = exec_arg(state);
  const CritKernelContext ctx(hm(), 0.5);
  const auto grid = tensor_grid(-3.0, 3.0, 7);
  for (auto _ : state) {
    auto k = k_crit_integral_grid(ctx, grid, exec);
    benchmark::DoNotOptimize(k.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size()));
}
BENCHMARK(BM_CritIntegralGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CriticalExperiment(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.exec = exec_arg(state);
  for (auto _ : state) {
    auto rep = double_scaling_experiment(cfg, hm());
    benchmark::DoNotOptimize(rep.rows.data());
  }
}
BENCHMARK(BM_CriticalExperiment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
