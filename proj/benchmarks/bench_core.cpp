#include <benchmark/benchmark.h>

#include "kgl/family.hpp"
#include "kgl/geometry.hpp"
#include "kgl/green.hpp"
#include "kgl/laplacian.hpp"
#include "kgl/ma_solver.hpp"
#include "kgl/sharpness.hpp"

namespace {

kgl::MAProblem smooth_problem(int n, int m) {
  kgl::GridSpec grid(n, m);
  kgl::FamilySpec spec;
  return kgl::generate_family(grid, spec, kgl::Hermitian::identity(n)).front().problem;
}

void BM_LaplacianApply(benchmark::State& state) {
  const auto problem = smooth_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const kgl::LaplacianOperator op(problem.background.omega_hat_field());
  kgl::ScalarField u = problem.F;
  std::vector<double> out(u.size());
  for (auto _ : state) {
    op.apply(u.values(), out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(u.size()));
}
BENCHMARK(BM_LaplacianApply)->Args({1, 256})->Args({2, 16})->Args({2, 32});

void BM_GreenSolve(benchmark::State& state) {
  const auto problem = smooth_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const auto sol = kgl::solve_ma(problem, 1e-8, 60);
  const kgl::LaplacianOperator op(sol.metric);
  for (auto _ : state) benchmark::DoNotOptimize(kgl::solve_green(op, 3, 1e-10));
}
BENCHMARK(BM_GreenSolve)->Args({1, 64})->Args({2, 16})->Unit(benchmark::kMillisecond);

void BM_SolveMA(benchmark::State& state) {
  const auto problem = smooth_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(kgl::solve_ma(problem, 1e-8, 60));
}
BENCHMARK(BM_SolveMA)->Args({1, 128})->Args({2, 16})->Unit(benchmark::kMillisecond);

void BM_RadialBudget(benchmark::State& state) {
  const double zeta = kgl::solve_zeta(0.4);
  const kgl::RadialProfile profile{0.4, 1e-6, 2, zeta, 1.5};
  for (auto _ : state) benchmark::DoNotOptimize(kgl::example31_budget(profile));
}
BENCHMARK(BM_RadialBudget);

}  // namespace
BENCHMARK_MAIN();
