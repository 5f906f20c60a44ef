#include <benchmark/benchmark.h>

#include "erem/fem.hpp"
#include "erem/matfunc.hpp"
#include "erem/mesh.hpp"

using namespace erem;

namespace {

OperatorAction lumped_operator(const DiscreteOperators& ops) {
    OperatorAction a;
    a.dim = ops.n;
    a.norm_estimate = ops.S.inf_norm() / ops.M_lumped.minCoeff();
    a.apply = [&ops](const Vec& in, Vec& out) { apply_Ah(ops, in, MassMode::lumped, out); };
    return a;
}

} // namespace

static void bm_dense_expm(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Mat A = Mat::Random(n, n) * 2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dense_expm(A));
    }
}
BENCHMARK(bm_dense_expm)->Arg(32)->Arg(64)->Arg(128);

static void bm_krylov_expmv(benchmark::State& state) {
    const Mesh m = build_interval_mesh(0.0, 1.0, static_cast<int>(state.range(0)));
    static DiscreteOperators ops; // keep alive across iterations
    ops = build_operators(m, BilinearFormSpec{});
    const OperatorAction op = lumped_operator(ops);
    const Vec v = Vec::Random(ops.n);
    KrylovParams p;
    p.max_substeps = 4096; // the stiff horizon below needs many substeps
    const double t = state.range(1) / 1e6; // microseconds of diffusion time
    for (auto _ : state) {
        benchmark::DoNotOptimize(krylov_expmv(op, t, v, p));
    }
}
BENCHMARK(bm_krylov_expmv)->Args({1024, 100})->Args({1024, 10000})->Args({4096, 100});

static void bm_krylov_phi1v(benchmark::State& state) {
    const Mesh m = build_interval_mesh(0.0, 1.0, static_cast<int>(state.range(0)));
    static DiscreteOperators ops;
    ops = build_operators(m, BilinearFormSpec{});
    const OperatorAction op = lumped_operator(ops);
    const Vec v = Vec::Random(ops.n);
    KrylovParams p;
    for (auto _ : state) {
        benchmark::DoNotOptimize(krylov_phi1v(op, 1e-4, v, p));
    }
}
BENCHMARK(bm_krylov_phi1v)->Arg(1024)->Arg(4096);
