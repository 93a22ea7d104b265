#include <benchmark/benchmark.h>

#include "dblab/boundary_maps.hpp"
#include "dblab/coefficients.hpp"
#include "dblab/fd_oracle.hpp"
#include "dblab/operators.hpp"
#include "dblab/random_fields.hpp"
#include "dblab/solvers.hpp"

using namespace dblab;

namespace {

CoefficientField bench_coefficient(int N, FamilyKind kind = FamilyKind::lower_triangular_random) {
    FamilySpec s;
    s.kind = kind;
    s.seed = 42;
    return make_family(s, GridSpec{1, N});
}

void BM_SignEigen(benchmark::State& st) {
    OperatorSet ops = build_operators(bench_coefficient(int(st.range(0))));
    for (auto _ : st) benchmark::DoNotOptimize(FunctionalCalculus(ops.uT.m).sign().data());
}
BENCHMARK(BM_SignEigen)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SignNewton(benchmark::State& st) {
    OperatorSet ops = build_operators(bench_coefficient(int(st.range(0))));
    for (auto _ : st) benchmark::DoNotOptimize(matrix_sign_newton(ops.uT.m).data());
}
BENCHMARK(BM_SignNewton)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_GammaND(benchmark::State& st) {
    const GridSpec g{1, int(st.range(0))};
    OperatorSet ops = build_operators(bench_coefficient(g.N));
    FunctionalCalculus calc(ops.uT.m);
    for (auto _ : st) benchmark::DoNotOptimize(gamma_nd(sgn_blocks(g, calc.sign()), -0.5).map.data());
}
BENCHMARK(BM_GammaND)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_NeumannSolveAndEvaluate(benchmark::State& st) {
    const GridSpec g{1, int(st.range(0))};
    auto ctx = make_context(bench_coefficient(g.N));
    Vec f = random_scalar_field(g, 7);
    const auto tg = default_t_grid(g);
    for (auto _ : st) benchmark::DoNotOptimize(evaluate(solve_neumann_l2(ctx, f), tg).grad.size());
}
BENCHMARK(BM_NeumannSolveAndEvaluate)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_OracleNeumann(benchmark::State& st) {
    const GridSpec g{1, int(st.range(0))};
    CoefficientField A = bench_coefficient(g.N, FamilyKind::smooth_trig);
    const StripMesh mesh = StripMesh::graded(g, 4 * g.N);
    OracleOptions oo;
    oo.scheme = XScheme::collocation;
    Vec ell = random_scalar_field(g, 9);
    for (auto _ : st) benchmark::DoNotOptimize(energy_solve_neumann(A, ell, mesh, oo).energy);
}
BENCHMARK(BM_OracleNeumann)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
