#include <apsolve/apsolve.hpp>
#include <benchmark/benchmark.h>

using namespace apsolve;

namespace {

void BM_Spmv(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = gen_tridiag(-1, 2, -1, n);
  const Vector x(n, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(spmv(a, x));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * a.nnz()));
}
BENCHMARK(BM_Spmv)->RangeMultiplier(4)->Range(256, 65536);

void BM_FactorizeBlocks(benchmark::State& state) {
  const Matrix a = gen_tridiag(-1, 2, -1, 4000);
  const auto part = make_partition(a.rows(), static_cast<std::size_t>(state.range(0)), true);
  for (auto _ : state) benchmark::DoNotOptimize(factorize_blocks(a, part));
}
BENCHMARK(BM_FactorizeBlocks)->Arg(20)->Arg(50)->Arg(100);

void BM_ApSweep(benchmark::State& state) {
  const Problem p = build_problem({Tridiag{-1, 2, -1, 2000}, Func1D::Poly});
  const BlockFactorization bf =
      factorize_blocks(p.a, make_partition(p.a.rows(), static_cast<std::size_t>(state.range(0)), true));
  const Projection p0 = initial_projection(p.a, p.b);
  for (auto _ : state) {
    ApState s;
    s.p = p0.p;
    s.c = p0.c;
    benchmark::DoNotOptimize(ap_v2_sweep(bf, p.b, std::move(s)));
  }
}
BENCHMARK(BM_ApSweep)->Arg(20)->Arg(50)->Arg(100);

void BM_ApapOuterStep(benchmark::State& state) {
  const Problem p = build_problem({Tridiag{-1, 2, -1, 400}, Func1D::Poly});
  SolverConfig cfg;
  cfg.block_size = 40;
  cfg.max_outer = 1;
  cfg.tol = 1e-30;
  for (auto _ : state) benchmark::DoNotOptimize(apap_solve(p.a, p.b, cfg));
}
BENCHMARK(BM_ApapOuterStep)->Unit(benchmark::kMillisecond);

void BM_GmresCycle(benchmark::State& state) {
  const Problem p = build_problem({Tridiag{-1, 2, -1.05, 4000}, Func1D::Sine});
  GmresConfig cfg;
  cfg.restart_m = static_cast<std::size_t>(state.range(0));
  cfg.max_outer = 1;
  cfg.tol = 1e-30;
  for (auto _ : state) benchmark::DoNotOptimize(gmres_solve(p.a, p.b, cfg));
}
BENCHMARK(BM_GmresCycle)->Arg(8)->Arg(16)->Arg(32);

}  // namespace
BENCHMARK_MAIN();
