#include <benchmark/benchmark.h>

#include <algorithm>
#include <cstdint>

#include "qlf/gauss.hpp"
#include "qlf/multieval.hpp"
#include "qlf/taylor.hpp"

namespace {

struct Fixture {
  qlf::Window window;
  qlf::ErrorBudget budget;
  qlf::CoefficientTable table;
  qlf::NodeProblem problem;
  double eps;
};

Fixture make_fixture(std::int64_t Q, std::int64_t a) {
  const qlf::Window window{Q, Q / 2};
  const auto budget = qlf::plan_budget(window.Q, window.Delta, 1e-6, 0.0);
  auto table = qlf::build_coefficient_table(0.0, budget.Q, budget.N, budget.R);
  auto problem = qlf::build_node_problem(a, table, window);
  const double eps = std::max(budget.epsilon3 / problem.sum.scale(), qlf::fast_eval_floor(problem.sum));
  return {window, budget, std::move(table), std::move(problem), eps};
}

}  // namespace

static void BM_GaussSumFast(benchmark::State& state) {
  const std::int64_t b = state.range(0);
  for (auto _ : state) {
    for (std::int64_t m = 1; m <= 64; ++m) benchmark::DoNotOptimize(qlf::gauss_sum_fast(b, m));
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_GaussSumFast)->Arg(10009)->Arg(200009)->Arg(1000003);

static void BM_CoefficientTable(benchmark::State& state) {
  const std::int64_t Q = state.range(0);
  const auto budget = qlf::plan_budget(Q, Q / 2, 1e-6, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qlf::build_coefficient_table(0.0, budget.Q, budget.N, budget.R));
  }
}
BENCHMARK(BM_CoefficientTable)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);

static void BM_BuildNodeProblem(benchmark::State& state) {
  const std::int64_t Q = state.range(0);
  const std::int64_t a = state.range(1);
  const qlf::Window window{Q, Q / 2};
  const auto budget = qlf::plan_budget(window.Q, window.Delta, 1e-6, 0.0);
  const auto table = qlf::build_coefficient_table(0.0, budget.Q, budget.N, budget.R);
  for (auto _ : state) benchmark::DoNotOptimize(qlf::build_node_problem(a, table, window));
}
BENCHMARK(BM_BuildNodeProblem)->Args({20000, 1})->Args({200000, 5})->Unit(benchmark::kMillisecond);

static void BM_FastEval(benchmark::State& state) {
  const Fixture f = make_fixture(state.range(0), state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qlf::fast_eval(f.problem.sum, f.problem.grid, f.eps, 1));
  }
  state.counters["K"] = static_cast<double>(f.problem.sum.K());
  state.counters["H"] = static_cast<double>(f.problem.grid.H);
}
BENCHMARK(BM_FastEval)->Args({20000, 1})->Args({200000, 5})->Args({200000, 1})
    ->Unit(benchmark::kMillisecond);

static void BM_DirectEval(benchmark::State& state) {
  const Fixture f = make_fixture(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(qlf::direct_eval(f.problem.sum, f.problem.grid));
  state.counters["K"] = static_cast<double>(f.problem.sum.K());
  state.counters["H"] = static_cast<double>(f.problem.grid.H);
}
BENCHMARK(BM_DirectEval)->Args({20000, 40})->Args({200000, 400})->Unit(benchmark::kMillisecond);
