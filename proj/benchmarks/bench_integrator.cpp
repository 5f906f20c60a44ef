#include <benchmark/benchmark.h>

#include "erem/problems.hpp"

using namespace erem;

static void bm_erem_step_1d(benchmark::State& state) {
    static ProblemSpec p = problem_semilinear_1d();
    const Mesh m = build_problem_mesh(p, 1.0 / state.range(0));
    static DiscreteOperators ops;
    ops = build_operators(m, bilinear_form_of(p));
    const SemilinearSystem sys = make_system(p, ops);
    const Vec u0 = l2_project(p.u0, ops);
    const double dt = p.T / 256;
    KrylovParams kp;
    kp.max_substeps = 4096; // fine meshes at this dt need deep substepping
    for (auto _ : state) {
        benchmark::DoNotOptimize(erem_step(sys, u0, dt, kp));
    }
}
BENCHMARK(bm_erem_step_1d)->Arg(256)->Arg(1024)->Arg(4096);

static void bm_erem_step_2d(benchmark::State& state) {
    static ProblemSpec p = problem_semilinear_2d();
    const Mesh m = build_problem_mesh(p, 1.0 / state.range(0));
    static DiscreteOperators ops;
    ops = build_operators(m, bilinear_form_of(p));
    const SemilinearSystem sys = make_system(p, ops);
    const Vec u0 = l2_project(p.u0, ops);
    const double dt = p.T / 128;
    KrylovParams kp;
    kp.max_substeps = 4096;
    for (auto _ : state) {
        benchmark::DoNotOptimize(erem_step(sys, u0, dt, kp));
    }
}
BENCHMARK(bm_erem_step_2d)->Arg(16)->Arg(32)->Arg(64);

static void bm_erem_vs_exp_euler(benchmark::State& state) {
    static ProblemSpec p = problem_semilinear_1d();
    const Mesh m = build_problem_mesh(p, 1.0 / 1024);
    static DiscreteOperators ops;
    ops = build_operators(m, bilinear_form_of(p));
    const SemilinearSystem sys = make_system(p, ops);
    const Vec u0 = l2_project(p.u0, ops);
    const double dt = p.T / 256;
    KrylovParams kp;
    kp.max_substeps = 4096; // fine meshes at this dt need deep substepping
    const bool euler = state.range(0) != 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(euler ? exp_euler_step(sys, u0, dt, kp)
                                       : erem_step(sys, u0, dt, kp));
    }
}
BENCHMARK(bm_erem_vs_exp_euler)->Arg(0)->Arg(1);
