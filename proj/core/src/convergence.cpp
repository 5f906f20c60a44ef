#include "erem/convergence.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace erem {

namespace {

void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    auto worker = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

int steps_for(double T, double dt, const char* what) {
    const double ratio = T / dt;
    const auto n = static_cast<long long>(std::llround(ratio));
    if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio)
        throw std::invalid_argument(std::string(what) + ": dt does not divide T");
    return static_cast<int>(n);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

double estimate_order(const std::vector<std::pair<double, double>>& param_error) {
    if (param_error.size() < 3)
        throw std::invalid_argument("estimate_order: insufficient-data (need >= 3 rows)");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [p, e] : param_error) {
        if (!(p > 0.0) || !(e > 0.0))
            throw std::invalid_argument("estimate_order: nonpositive parameter or error");
        const double x = std::log(p), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(param_error.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double estimate_order(const std::vector<ConvRow>& rows, bool refine_in_dt) {
    std::vector<std::pair<double, double>> pe;
    pe.reserve(rows.size());
    for (const auto& r : rows) pe.emplace_back(refine_in_dt ? r.dt : r.h, r.error);
    return estimate_order(pe);
}

double error_vs_vector(const DiscreteOperators& ops, const Vec& numeric, const Vec& reference) {
    if (numeric.size() != reference.size() || numeric.size() != ops.n)
        throw std::invalid_argument("error_vs_vector: dimension-mismatch");
    return l2_norm(ops, numeric - reference);
}

double error_vs_exact(const DiscreteOperators& ops, const Vec& numeric, const SpaceTimeFn& exact,
                      double t) {
    const Vec ref = l2_project([&](double x, double y) { return exact(x, y, t); }, ops);
    return error_vs_vector(ops, numeric, ref);
}

Vec prolong(const DiscreteOperators& coarse, const DiscreteOperators& fine,
            const Vec& coarse_free) {
    const Mesh& fm = fine.mesh;
    if (fm.parent_edge.empty() ||
        static_cast<int>(fm.parent_edge.size()) != fm.n_nodes())
        throw std::invalid_argument("prolong: fine mesh is not a refinement of the coarse mesh");
    const Vec nodal_c = coarse.scatter(coarse_free);
    Vec nodal_f(fm.n_nodes());
    for (int i = 0; i < fm.n_nodes(); ++i) {
        const auto& pe = fm.parent_edge[i];
        nodal_f[i] = 0.5 * (nodal_c[pe[0]] + nodal_c[pe[1]]);
    }
    return fine.restrict_free(nodal_f);
}

ConvergenceTable run_temporal_study(const ProblemSpec& p, double h_fixed,
                                    const std::vector<double>& dt_list,
                                    const StudyOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    if (dt_list.size() < 1) throw std::invalid_argument("run_temporal_study: empty dt list");
    for (std::size_t i = 1; i < dt_list.size(); ++i)
        if (!(dt_list[i] < dt_list[i - 1]))
            throw std::invalid_argument("run_temporal_study: dt list not strictly decreasing");
    for (double dt : dt_list) steps_for(p.T, dt, "run_temporal_study"); // fail fast

    const Mesh mesh = build_problem_mesh(p, h_fixed);
    const DiscreteOperators ops = build_operators(mesh, bilinear_form_of(p));
    const SemilinearSystem sys = make_system(p, ops, opt.mass_mode);
    const Vec u0h = l2_project(p.u0, ops);

    auto solve_at = [&](double dt) {
        StepperConfig cfg;
        cfg.dt = dt;
        cfg.n_steps = steps_for(p.T, dt, "run_temporal_study");
        cfg.krylov = opt.krylov;
        cfg.scheme = opt.scheme;
        return integrate(sys, u0h, cfg);
    };

    const int levels = static_cast<int>(dt_list.size());
    const double dt_ref = dt_list.back() / opt.ref_factor;
    std::vector<Vec> solutions(levels + 1);
    parallel_for(levels + 1, opt.jobs, [&](int i) {
        const double dt = i < levels ? dt_list[i] : dt_ref;
        try {
            solutions[i] = solve_at(dt);
        } catch (const std::exception& e) {
            throw std::runtime_error("run_temporal_study: dt = " + fmt(dt) + ": " + e.what());
        }
    });
    const Vec& u_ref = solutions[levels];

    ConvergenceTable table;
    table.study_kind = "temporal";
    table.problem = p.name;
    table.theoretical_order = 2.0;
    for (int i = 0; i < levels; ++i)
        table.rows.push_back({mesh.h, dt_list[i], p.T,
                              error_vs_vector(ops, solutions[i], u_ref)});

    const double floor = 100.0 * opt.krylov.tol * std::max(1.0, l2_norm(ops, u_ref));
    bool all_floor = true;
    for (const auto& r : table.rows) all_floor = all_floor && r.error <= floor;
    if (all_floor) {
        table.exact_floor = true; // time discretization is exact; nothing to fit
    } else {
        table.fitted_order = estimate_order(table.rows, /*refine_in_dt=*/true);
    }

    if (opt.consistency_check && !table.exact_floor) {
        // reference contamination guard: double the reference resolution
        const Vec u_ref2 = solve_at(dt_ref / 2.0);
        double worst = 0.0;
        for (int i = 0; i < levels; ++i) {
            const double e2 = error_vs_vector(ops, solutions[i], u_ref2);
            worst = std::max(worst, std::abs(e2 - table.rows[i].error) /
                                        std::max(table.rows[i].error, 1e-300));
        }
        table.consistency_check = worst;
    }
    table.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return table;
}

ConvergenceTable run_spatial_study(const ProblemSpec& p, double base_h, int levels,
                                   double dt_fixed, const StudyOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    if (levels < 1) throw std::invalid_argument("run_spatial_study: levels < 1");
    const int n_steps = steps_for(p.T, dt_fixed, "run_spatial_study");
    const bool self_reference = !p.has_exact();
    const int n_meshes = levels + (self_reference ? 1 : 0);

    std::vector<Mesh> meshes;
    meshes.reserve(n_meshes);
    meshes.push_back(build_problem_mesh(p, base_h));
    for (int k = 1; k < n_meshes; ++k) meshes.push_back(refine_uniform(meshes.back()));

    std::vector<DiscreteOperators> all_ops(n_meshes);
    for (int k = 0; k < n_meshes; ++k) all_ops[k] = build_operators(meshes[k], bilinear_form_of(p));

    auto solve_level = [&](int k, double dt, int steps) {
        const SemilinearSystem sys = make_system(p, all_ops[k], opt.mass_mode);
        StepperConfig cfg;
        cfg.dt = dt;
        cfg.n_steps = steps;
        cfg.krylov = opt.krylov;
        cfg.scheme = opt.scheme;
        return integrate(sys, l2_project(p.u0, all_ops[k]), cfg);
    };

    std::vector<Vec> solutions(n_meshes);
    parallel_for(n_meshes, opt.jobs, [&](int k) {
        try {
            solutions[k] = solve_level(k, dt_fixed, n_steps);
        } catch (const std::exception& e) {
            throw std::runtime_error("run_spatial_study: h = " + fmt(meshes[k].h) + ": " +
                                     e.what());
        }
    });

    auto level_error = [&](int k, const Vec& uk, const Vec& next_finer) {
        if (!self_reference) return error_vs_exact(all_ops[k], uk, p.exact, p.T);
        return error_vs_vector(all_ops[k + 1], prolong(all_ops[k], all_ops[k + 1], uk),
                               next_finer);
    };

    ConvergenceTable table;
    table.study_kind = "spatial";
    table.problem = p.name;
    table.theoretical_order = p.declared_spatial_order();
    for (int k = 0; k < levels; ++k) {
        const Vec& next_finer = self_reference ? solutions[k + 1] : solutions[k];
        table.rows.push_back({meshes[k].h, dt_fixed, p.T, level_error(k, solutions[k], next_finer)});
    }
    table.fitted_order = estimate_order(table.rows, /*refine_in_dt=*/false);

    if (opt.consistency_check) {
        // temporal-subdominance spot check: halve dt on the finest row
        const int k = levels - 1;
        const Vec u_half = solve_level(k, dt_fixed / 2.0, 2 * n_steps);
        const Vec ref_half =
            self_reference ? solve_level(k + 1, dt_fixed / 2.0, 2 * n_steps) : Vec();
        const double e_half = level_error(k, u_half, ref_half);
        table.consistency_check = std::abs(e_half - table.rows[k].error) /
                                  std::max(table.rows[k].error, 1e-300);
    }
    table.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return table;
}

void write_csv(const ConvergenceTable& t, std::ostream& os) {
    os << "study,problem,h,dt,t,error\n";
    for (const auto& r : t.rows)
        os << t.study_kind << ',' << t.problem << ',' << fmt(r.h) << ',' << fmt(r.dt) << ','
           << fmt(r.t_sample) << ',' << fmt(r.error) << '\n';
    os << "# fitted_order = " << (t.exact_floor ? "exact (no order fit)" : fmt(t.fitted_order))
       << '\n';
    os << "# theoretical_order = " << fmt(t.theoretical_order) << '\n';
    if (std::isfinite(t.consistency_check))
        os << "# consistency_check = " << fmt(t.consistency_check) << '\n';
}

void write_loglog(const ConvergenceTable& t, std::ostream& os) {
    const bool temporal = t.study_kind == "temporal";
    for (const auto& r : t.rows) {
        if (!(r.error > 0.0)) continue;
        os << fmt(std::log10(temporal ? r.dt : r.h)) << ' ' << fmt(std::log10(r.error)) << '\n';
    }
}

} // namespace erem
