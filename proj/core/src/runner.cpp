#include "erem/runner.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace erem {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void constraint_violation(const std::string& what) {
    throw std::runtime_error("constraint-violation: " + what);
}

double require_positive(const json& j, const char* key) {
    if (!j.is_number()) constraint_violation(std::string(key) + " must be a number");
    const double v = j.get<double>();
    if (!(v > 0.0)) constraint_violation(std::string(key) + " must be positive");
    return v;
}

// order bands reported in the summary, per study kind and data class
std::pair<double, double> verdict_band(const ConvergenceTable& t, const ProblemSpec& p) {
    if (t.study_kind == "temporal") return {1.8, 2.2};
    switch (p.beta_class) {
        case BetaClass::two: return {1.85, 2.15};
        case BetaClass::sub1: return {1.3, 2.0};
        case BetaClass::one_to_two: return {p.beta - 0.3, 2.2};
    }
    return {0.0, 3.0};
}

void write_svg_plot(const ConvergenceTable& t, std::ostream& os) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : t.rows)
        if (r.error > 0.0)
            pts.emplace_back(std::log10(t.study_kind == "temporal" ? r.dt : r.h),
                             std::log10(r.error));
    const int W = 480, H = 360, pad = 48;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    if (pts.size() >= 2) {
        double x0 = pts[0].first, x1 = pts[0].first, y0 = pts[0].second, y1 = pts[0].second;
        for (auto& [x, y] : pts) {
            x0 = std::min(x0, x); x1 = std::max(x1, x);
            y0 = std::min(y0, y); y1 = std::max(y1, y);
        }
        auto px = [&](double x) { return pad + (x - x0) / std::max(x1 - x0, 1e-12) * (W - 2 * pad); };
        auto py = [&](double y) { return H - pad - (y - y0) / std::max(y1 - y0, 1e-12) * (H - 2 * pad); };
        os << "<polyline fill='none' stroke='steelblue' stroke-width='2' points='";
        for (auto& [x, y] : pts) os << px(x) << ',' << py(y) << ' ';
        os << "'/>\n";
        for (auto& [x, y] : pts)
            os << "<circle cx='" << px(x) << "' cy='" << py(y) << "' r='3' fill='steelblue'/>\n";
        os << "<text x='" << pad << "' y='" << H - 12 << "' font-size='12'>log10("
           << (t.study_kind == "temporal" ? "dt" : "h") << ") vs log10(error), slope "
           << (t.exact_floor ? std::string("n/a") : fmt(t.fitted_order)) << "</text>\n";
    }
    os << "</svg>\n";
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("run: cannot open output file " + path.string());
    return os;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("parse-error: ") + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("parse-error: top-level value must be an object");

    static const std::vector<std::string> known = {
        "problem", "study",       "levels",        "base_h", "base_dt", "krylov",
        "mass_mode", "scheme",    "output_path",   "snapshot_times",    "jobs", "svg"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const auto& k : known) ok = ok || k == key;
        if (!ok) throw std::runtime_error("unknown-key: '" + key + "'");
    }

    RunConfig cfg;
    if (!j.contains("problem") || !j["problem"].is_string())
        constraint_violation("'problem' (string) is required");
    cfg.problem = j["problem"].get<std::string>();
    make_problem(cfg.problem); // throws listing the registry for unknown names

    if (j.contains("study")) {
        cfg.study = j["study"].get<std::string>();
        if (cfg.study != "temporal" && cfg.study != "spatial" && cfg.study != "single-run")
            constraint_violation("'study' must be temporal, spatial or single-run");
    }
    if (j.contains("levels")) {
        if (!j["levels"].is_number_integer()) constraint_violation("'levels' must be an integer");
        cfg.levels = j["levels"].get<int>();
    }
    if (j.contains("base_h")) cfg.base_h = require_positive(j["base_h"], "base_h");
    if (j.contains("base_dt")) cfg.base_dt = require_positive(j["base_dt"], "base_dt");
    if (j.contains("krylov")) {
        const json& k = j["krylov"];
        if (!k.is_object()) constraint_violation("'krylov' must be an object");
        for (const auto& [key, value] : k.items()) {
            (void)value;
            if (key != "tol" && key != "m_max" && key != "max_substeps")
                throw std::runtime_error("unknown-key: 'krylov." + key + "'");
        }
        if (k.contains("tol")) cfg.krylov.tol = require_positive(k["tol"], "krylov.tol");
        if (k.contains("m_max")) cfg.krylov.m_max = k["m_max"].get<int>();
        if (k.contains("max_substeps")) cfg.krylov.max_substeps = k["max_substeps"].get<int>();
        if (cfg.krylov.m_max < 2) constraint_violation("krylov.m_max must be >= 2");
        if (cfg.krylov.tol >= 1.0) constraint_violation("krylov.tol must be in (0, 1)");
        if (cfg.krylov.max_substeps < 1) constraint_violation("krylov.max_substeps must be >= 1");
    }
    if (j.contains("mass_mode")) {
        const auto s = j["mass_mode"].get<std::string>();
        if (s == "lumped") cfg.mass_mode = MassMode::lumped;
        else if (s == "consistent") cfg.mass_mode = MassMode::consistent;
        else constraint_violation("'mass_mode' must be lumped or consistent");
    }
    if (j.contains("scheme")) {
        const auto s = j["scheme"].get<std::string>();
        if (s == "erem") cfg.scheme = Scheme::erem;
        else if (s == "exp_euler") cfg.scheme = Scheme::exp_euler;
        else constraint_violation("'scheme' must be erem or exp_euler");
    }
    if (j.contains("output_path")) cfg.output_path = j["output_path"].get<std::string>();
    if (j.contains("snapshot_times")) {
        for (const auto& v : j["snapshot_times"]) cfg.snapshot_times.push_back(v.get<double>());
    }
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
    if (j.contains("svg")) cfg.svg = j["svg"].get<bool>();
    return cfg;
}

void finalize_config(RunConfig& cfg) {
    const ProblemSpec p = make_problem(cfg.problem);
    const double extent = p.hi[0] - p.lo[0];
    const bool is_study = cfg.study != "single-run";
    if (is_study && cfg.levels < 3) constraint_violation("levels must be >= 3 for studies");
    if (!cfg.base_h) {
        if (cfg.study == "temporal") cfg.base_h = extent / 256.0;
        else if (cfg.study == "spatial") cfg.base_h = extent / 8.0;
        else cfg.base_h = extent / 64.0;
    }
    if (!cfg.base_dt) {
        if (cfg.study == "temporal") cfg.base_dt = p.T / 8.0;
        else if (cfg.study == "spatial") cfg.base_dt = p.T / 4096.0;
        else cfg.base_dt = p.T / 100.0;
    }
    const double ratio = p.T / *cfg.base_dt;
    if (std::abs(ratio - std::llround(ratio)) > 1e-9 * ratio || ratio < 1.0)
        constraint_violation("base_dt = " + fmt(*cfg.base_dt) + " does not divide T = " +
                             fmt(p.T) + " of problem " + p.name);
}

RunResult run(RunConfig cfg) {
    finalize_config(cfg);
    const ProblemSpec p = make_problem(cfg.problem);
    std::filesystem::create_directories(cfg.output_path);
    const std::filesystem::path out(cfg.output_path);

    StudyOptions opt;
    opt.mass_mode = cfg.mass_mode;
    opt.scheme = cfg.scheme;
    opt.krylov = cfg.krylov;
    opt.jobs = cfg.jobs;

    RunResult result;
    const std::string stem = cfg.study + "_" + cfg.problem;

    if (cfg.study == "single-run") {
        const Mesh mesh = build_problem_mesh(p, *cfg.base_h);
        const DiscreteOperators ops = build_operators(mesh, bilinear_form_of(p));
        const SemilinearSystem sys = make_system(p, ops, cfg.mass_mode);
        StepperConfig sc;
        sc.dt = *cfg.base_dt;
        sc.n_steps = static_cast<int>(std::llround(p.T / sc.dt));
        sc.krylov = cfg.krylov;
        sc.scheme = cfg.scheme;

        std::vector<std::pair<double, Vec>> snaps;
        StepObserver obs;
        if (!cfg.snapshot_times.empty()) {
            obs = [&](int, double t, const Vec& u) {
                for (double want : cfg.snapshot_times)
                    if (std::abs(t - want) < 0.5 * sc.dt) snaps.emplace_back(t, u);
            };
        }
        const Vec u0h = l2_project(p.u0, ops);
        const Vec u_final = integrate(sys, u0h, sc, obs);
        result.final_l2_norm = l2_norm(ops, u_final);

        int si = 0;
        snaps.emplace_back(p.T, u_final);
        for (const auto& [t, u] : snaps) {
            const auto path = out / (stem + "_snapshot_" + std::to_string(si++) + ".dat");
            auto os = open_out(path);
            os << "# t = " << fmt(t) << "\n";
            const Vec nodal = ops.scatter(u);
            for (int i = 0; i < mesh.n_nodes(); ++i) {
                os << fmt(mesh.nodes[i][0]) << ' ';
                if (mesh.dim == 2) os << fmt(mesh.nodes[i][1]) << ' ';
                os << fmt(nodal[i]) << '\n';
            }
            result.extra_files.push_back(path.string());
        }
        const auto spath = out / (stem + "_summary.txt");
        auto os = open_out(spath);
        os << "problem: " << p.name << "\nstudy: single-run\n";
        os << "h: " << fmt(mesh.h) << "\ndt: " << fmt(sc.dt) << "\nsteps: " << sc.n_steps << '\n';
        os << "final_l2_norm: " << fmt(result.final_l2_norm) << '\n';
        result.summary_path = spath.string();
        return result;
    }

    if (cfg.study == "temporal") {
        std::vector<double> dt_list(cfg.levels);
        for (int i = 0; i < cfg.levels; ++i) dt_list[i] = *cfg.base_dt / std::exp2(i);
        result.table = run_temporal_study(p, *cfg.base_h, dt_list, opt);
    } else {
        result.table = run_spatial_study(p, *cfg.base_h, cfg.levels, *cfg.base_dt, opt);
    }
    const ConvergenceTable& t = result.table;

    {
        const auto path = out / (stem + ".csv");
        auto os = open_out(path);
        write_csv(t, os);
        result.csv_path = path.string();
    }
    {
        const auto path = out / (stem + "_loglog.dat");
        auto os = open_out(path);
        write_loglog(t, os);
        result.extra_files.push_back(path.string());
    }
    if (cfg.svg) {
        const auto path = out / (stem + ".svg");
        auto os = open_out(path);
        write_svg_plot(t, os);
        result.extra_files.push_back(path.string());
    }
    {
        const auto path = out / (stem + "_summary.txt");
        auto os = open_out(path);
        const auto [lo, hi] = verdict_band(t, p);
        os << "problem: " << p.name << "\nstudy: " << t.study_kind << '\n';
        os << "rows:\n";
        for (const auto& r : t.rows)
            os << "  h=" << fmt(r.h) << " dt=" << fmt(r.dt) << " t=" << fmt(r.t_sample)
               << " error=" << fmt(r.error) << '\n';
        if (t.exact_floor) {
            os << "fitted_order: exact (errors at solver tolerance; no order fit)\n";
        } else {
            os << "fitted_order: " << fmt(t.fitted_order) << '\n';
        }
        os << "theoretical_order: " << fmt(t.theoretical_order);
        if (t.study_kind == "spatial" && p.beta_class == BetaClass::two && !p.claims_clean_h2)
            os << " (up to a logarithmic factor)";
        os << '\n';
        os << "order_band: [" << fmt(lo) << ", " << fmt(hi) << "]\n";
        os << "verdict: "
           << (t.exact_floor
                   ? "PASS (exact integration)"
                   : (t.fitted_order >= lo && t.fitted_order <= hi ? "PASS" : "FAIL"))
           << '\n';
        if (std::isfinite(t.consistency_check))
            os << "consistency_check: " << fmt(t.consistency_check) << '\n';
        os << "wall_seconds: " << t.wall_seconds << '\n';
        result.summary_path = path.string();
    }
    return result;
}

} // namespace erem
