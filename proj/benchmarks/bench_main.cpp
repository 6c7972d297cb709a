#include <benchmark/benchmark.h>

#include "dirac/counterexample.hpp"
#include "dirac/green.hpp"
#include "dirac/spectrum.hpp"

using namespace dirac;

static void BM_fundamental_free(benchmark::State& state) {
  FundamentalSolver solver(zero_potential());
  const cplx lam(double(state.range(0)), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(lam).end());
}
BENCHMARK(BM_fundamental_free)->Arg(8)->Arg(32)->Arg(128);

static void BM_fundamental_smooth(benchmark::State& state) {
  FundamentalSolver solver(endpoint_smooth_potential());
  const cplx lam(double(state.range(0)), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(lam).end());
}
BENCHMARK(BM_fundamental_smooth)->Arg(8)->Arg(32)->Arg(128);

static void BM_delta_eval(benchmark::State& state) {
  FundamentalSolver solver(endpoint_smooth_potential());
  const BcClassification bc = classify(periodic_type_matrix(cplx(1.0, 0.0)));
  const CharacteristicFunction delta(&solver, bc.minors);
  const cplx lam(double(state.range(0)) + 0.13, 0.21);
  for (auto _ : state) benchmark::DoNotOptimize(delta(lam));
}
BENCHMARK(BM_delta_eval)->Arg(8)->Arg(64);

static void BM_locate_disk(benchmark::State& state) {
  FundamentalSolver solver(endpoint_smooth_potential());
  const BcClassification bc = classify(periodic_type_matrix(cplx(1.0, 0.0)));
  const long long n = state.range(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(locate_eigenvalues(solver, bc, n, n));
}
BENCHMARK(BM_locate_disk)->Arg(4)->Arg(16);

static void BM_theta_eval(benchmark::State& state) {
  const LacunaryPlan plan = lacunary_plan(4, 0.5, cplx(1.0, 0.0), 4, 40);
  double x = 0.0;
  for (auto _ : state) {
    x += 1e-4;
    if (x > pi) x = 0.0;
    benchmark::DoNotOptimize(theta(x, plan));
  }
}
BENCHMARK(BM_theta_eval);

static void BM_hjk_norms(benchmark::State& state) {
  FundamentalSolver solver(endpoint_smooth_potential());
  const BcClassification bc = classify(periodic_type_matrix(cplx(-1.0, 0.0)));
  const cplx lam(4.2, 0.1);
  for (auto _ : state) {
    GreenKernel gk(solver, bc, lam, std::size_t(state.range(0)));
    benchmark::DoNotOptimize(gk.hjk_norms());
  }
}
BENCHMARK(BM_hjk_norms)->Arg(33)->Arg(65);

BENCHMARK_MAIN();
