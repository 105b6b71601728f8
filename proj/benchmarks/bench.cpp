#include <benchmark/benchmark.h>

#include "vshell/ansatz.hpp"
#include "vshell/einstein.hpp"
#include "vshell/newton.hpp"

namespace {

vshell::AnsatzParams newt_params() {
  vshell::AnsatzParams p;
  p.regime = vshell::Regime::newtonian;
  p.k = 0.5;
  p.l = 0.25;
  p.c0 = 0.8;
  p.E0 = -1.0;
  p.L0 = 0.3;
  return p;
}

vshell::AnsatzParams rel_params() {
  vshell::AnsatzParams p;
  p.regime = vshell::Regime::relativistic;
  p.k = 0.5;
  p.l = 0.25;
  p.c0 = 0.05;
  p.E0 = 0.95;
  p.L0 = 0.05;
  return p;
}

void bm_beta_const(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(vshell::beta_const_newton(0.5, 0.25));
  }
}
BENCHMARK(bm_beta_const);

void bm_kernel_newton(benchmark::State& state) {
  const auto p = newt_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(vshell::g_newton(-1.7, p));
  }
}
BENCHMARK(bm_kernel_newton);

void bm_kernel_rel(benchmark::State& state) {
  const auto p = rel_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(vshell::g_rel(0.8, p));
  }
}
BENCHMARK(bm_kernel_rel);

void bm_source_rel(benchmark::State& state) {
  const auto p = rel_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(vshell::source_rel(1.1, -0.1, p));
  }
}
BENCHMARK(bm_source_rel);

void bm_solve_newton(benchmark::State& state) {
  auto p = newt_params();
  vshell::SolverConfig cfg;
  cfg.output_grid_size = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(vshell::solve_newton(p, -2.0, cfg));
  }
}
BENCHMARK(bm_solve_newton)->Arg(1024)->Arg(8192);

void bm_solve_einstein(benchmark::State& state) {
  auto p = rel_params();
  vshell::SolverConfig cfg;
  cfg.output_grid_size = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(vshell::solve_einstein(p, -0.3, cfg));
  }
}
BENCHMARK(bm_solve_einstein)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
