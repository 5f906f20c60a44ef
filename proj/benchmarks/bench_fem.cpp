#include <benchmark/benchmark.h>

#include "erem/fem.hpp"
#include "erem/mesh.hpp"

#include <cmath>

using namespace erem;

static void bm_assemble_1d(benchmark::State& state) {
    const Mesh m = build_interval_mesh(0.0, 1.0, static_cast<int>(state.range(0)));
    BilinearFormSpec form;
    form.coeffs = CoefficientField::constant(Eigen::Matrix2d::Identity() * 0.1,
                                             Eigen::Vector2d(0.5, 0.0));
    const FreeDofMap dofs = build_free_dofs(m, form.bc);
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_stiffness(m, form, dofs));
    }
}
BENCHMARK(bm_assemble_1d)->Arg(256)->Arg(1024)->Arg(4096);

static void bm_assemble_2d(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Mesh m = build_rect_mesh(n, n, {0, 0}, {1, 1});
    BilinearFormSpec form;
    const FreeDofMap dofs = build_free_dofs(m, form.bc);
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_stiffness(m, form, dofs));
    }
}
BENCHMARK(bm_assemble_2d)->Arg(16)->Arg(32)->Arg(64);

static void bm_mass_cg_solve(benchmark::State& state) {
    const Mesh m = build_interval_mesh(0.0, 1.0, static_cast<int>(state.range(0)));
    const DiscreteOperators ops = build_operators(m, BilinearFormSpec{});
    const Vec b = Vec::Random(ops.n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cg_solve(ops.M, b, 1e-12));
    }
}
BENCHMARK(bm_mass_cg_solve)->Arg(256)->Arg(1024)->Arg(4096);

static void bm_l2_project_step(benchmark::State& state) {
    const Mesh m = build_interval_mesh(0.0, 1.0, static_cast<int>(state.range(0)));
    const DiscreteOperators ops = build_operators(m, BilinearFormSpec{});
    const auto step = [](double x, double) { return (x > 0.25 && x < 0.75) ? 1.0 : 0.0; };
    for (auto _ : state) {
        benchmark::DoNotOptimize(l2_project(step, ops));
    }
}
BENCHMARK(bm_l2_project_step)->Arg(1024);
