// Acceptance suite: runs each criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit status = number of failed criteria.
// Usage: erem_acceptance [A1 A2 ...]; no arguments runs everything.

#include "erem/convergence.hpp"
#include "erem/runner.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

using namespace erem;

namespace {

constexpr double pi = std::numbers::pi;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig fixture(const std::string& name, const std::string& outdir) {
    RunConfig cfg = parse_config(read_file(std::string(EREM_CONFIG_DIR) + "/" + name));
    cfg.output_path = outdir;
    return cfg;
}

std::string num(double v, int prec = 4) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

OperatorAction matrix_action(const Mat& A) {
    OperatorAction op;
    op.dim = static_cast<int>(A.rows());
    op.norm_estimate = A.cwiseAbs().colwise().sum().maxCoeff();
    op.apply = [A](const Vec& in, Vec& out) { out.noalias() = A * in; };
    return op;
}

// ---------------------------------------------------------------- A1 / A2

bool temporal_band(const std::string& cfg_name, const std::string& out, bool check_tol_halving,
                   std::string& detail) {
    const RunConfig cfg = fixture(cfg_name, out);
    const RunResult r = run(cfg);
    const double slope = r.table.fitted_order;
    bool ok = slope >= 1.8 && slope <= 2.2;
    detail = "temporal slope " + num(slope) + " in [1.8, 2.2]";

    if (check_tol_halving && ok) {
        const ProblemSpec p = make_problem(cfg.problem);
        StudyOptions opt;
        opt.krylov = cfg.krylov;
        opt.krylov.tol *= 0.5;
        opt.consistency_check = false;
        std::vector<double> dts(cfg.levels);
        for (int i = 0; i < cfg.levels; ++i) dts[i] = *cfg.base_dt / std::exp2(i);
        const ConvergenceTable t2 = run_temporal_study(p, *cfg.base_h, dts, opt);
        double worst = 0.0;
        for (std::size_t i = 0; i < t2.rows.size(); ++i)
            worst = std::max(worst, std::abs(t2.rows[i].error - r.table.rows[i].error) /
                                        r.table.rows[i].error);
        ok = ok && worst < 0.01;
        detail += "; halving Krylov tol changes errors by at most " + num(100.0 * worst) + "%";
    }
    return ok;
}

bool criterion_a1(std::string& detail) {
    return temporal_band("a1_temporal_semilinear_1d.json", "acceptance_out/a1", true, detail);
}

bool criterion_a2(std::string& detail) {
    return temporal_band("a2_temporal_semilinear_1d_nonsmooth.json", "acceptance_out/a2", false,
                         detail);
}

// --------------------------------------------------------------------- A3

bool criterion_a3(std::string& detail) {
    const RunResult lumped =
        run(fixture("a3_spatial_heat_smooth_1d_lumped.json", "acceptance_out/a3_lumped"));
    const RunResult consistent =
        run(fixture("a3_spatial_heat_smooth_1d_consistent.json", "acceptance_out/a3_consistent"));
    const double s1 = lumped.table.fitted_order;
    const double s2 = consistent.table.fitted_order;
    detail = "spatial slope lumped " + num(s1) + ", consistent " + num(s2) + ", band [1.85, 2.15]";
    return s1 >= 1.85 && s1 <= 2.15 && s2 >= 1.85 && s2 <= 2.15;
}

// --------------------------------------------------------------------- A4

// intermediate sampling of the same sweep: fit the transient-regime slope at
// an early time where the nonsmooth data still bites (diagnostic only)
double early_time_slope(const ProblemSpec& p, double dt, double t_early) {
    std::vector<std::pair<double, double>> rows;
    for (int n : {8, 16, 32, 64, 128}) {
        const Mesh m = build_problem_mesh(p, 1.0 / n);
        const DiscreteOperators ops = build_operators(m, bilinear_form_of(p));
        const SemilinearSystem sys = make_system(p, ops);
        StepperConfig cfg;
        cfg.dt = dt;
        cfg.n_steps = static_cast<int>(std::llround(t_early / dt));
        const Vec u = integrate(sys, l2_project(p.u0, ops), cfg);
        rows.emplace_back(m.h, error_vs_exact(ops, u, p.exact, cfg.n_steps * dt));
    }
    return estimate_order(rows);
}

bool criterion_a4(std::string& detail) {
    const RunResult rough =
        run(fixture("a4_spatial_heat_nonsmooth_1d.json", "acceptance_out/a4"));
    const double slope = rough.table.fitted_order;
    const bool band = slope >= 1.3 && slope <= 2.0;

    // smooth-case baseline on the identical sweep
    const RunResult smooth =
        run(fixture("a3_spatial_heat_smooth_1d_lumped.json", "acceptance_out/a4_smooth_ref"));
    const double reduction = smooth.table.fitted_order - slope;
    const bool reduced = reduction >= 0.1;

    const ProblemSpec p = make_problem("heat_nonsmooth_1d");
    const double transient = early_time_slope(p, 0.1 / 4096, 0.002);

    detail = "spatial slope " + num(slope) + " in [1.3, 2.0]: " + (band ? "yes" : "no") +
             "; reduction vs smooth slope " + num(smooth.table.fitted_order) + " is " +
             num(reduction) + " (need >= 0.1): " + (reduced ? "yes" : "no") +
             " [diagnostic: transient slope at t=0.002 is " + num(transient) +
             ", so the reduced regime lives in the early transient, not at t = T]";
    return band && reduced;
}

// --------------------------------------------------------------------- A5

bool criterion_a5(std::string& detail) {
    const ProblemSpec p = problem_heat_smooth_1d();
    const Mesh m = build_problem_mesh(p, 1.0 / 64);
    const DiscreteOperators ops = build_operators(m, bilinear_form_of(p));
    const double c = 1.0;
    KrylovParams kp;

    SemilinearSystem sys;
    sys.ops = &ops;
    sys.nonlin = NonlinearTerm::linear(c);
    const Vec u0h = l2_project(p.u0, ops);

    OperatorAction shifted;
    shifted.dim = ops.n;
    shifted.norm_estimate = ops.S.inf_norm() / ops.M_lumped.minCoeff() + c;
    shifted.apply = [&ops, c](const Vec& in, Vec& out) {
        apply_Ah(ops, in, MassMode::lumped, out);
        out += c * in;
    };
    const Vec ref = krylov_expmv(shifted, p.T, u0h, kp);
    const double ref_norm = l2_norm(ops, ref);

    bool ok = true;
    detail = "relative errors";
    for (int N : {1, 10, 100}) {
        StepperConfig cfg;
        cfg.dt = p.T / N;
        cfg.n_steps = N;
        cfg.krylov = kp;
        const Vec u = integrate(sys, u0h, cfg);
        const double rel = l2_norm(ops, u - ref) / ref_norm;
        ok = ok && rel <= 10.0 * N * kp.tol;
        detail += " N=" + std::to_string(N) + ": " + num(rel, 3) +
                  " (cap " + num(10.0 * N * kp.tol, 3) + ")";
    }
    return ok;
}

// --------------------------------------------------------------------- A6

struct OracleCase {
    Mat K;
    double t;
    std::string kind;
};

OracleCase make_case(int i, std::mt19937& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    OracleCase c;
    if (i % 3 == 0) {
        const int n = 20 + static_cast<int>(unif(rng) * 180);
        Mat A = Mat::Zero(n, n);
        std::uniform_int_distribution<int> col(0, n - 1);
        for (int r = 0; r < n; ++r) {
            A(r, r) = -(1.0 + unif(rng));
            for (int k = 0; k < 5; ++k) A(r, col(rng)) += 0.6 * (unif(rng) - 0.5);
        }
        const double target = 10.0 + 150.0 * unif(rng);
        A *= target / A.cwiseAbs().colwise().sum().maxCoeff();
        c.K = A;
        c.t = 0.1 + 0.4 * unif(rng);
        c.kind = "random-sparse";
    } else if (i % 3 == 1) {
        const int nel = 21 + static_cast<int>(unif(rng) * 180);
        const Mesh m = build_interval_mesh(0.0, 1.0, nel);
        BilinearFormSpec form;
        form.coeffs = CoefficientField::constant(
            Eigen::Matrix2d::Identity() * (0.05 + 0.95 * unif(rng)),
            Eigen::Vector2d(unif(rng), 0.0));
        const DiscreteOperators ops = build_operators(m, form);
        Mat K = -(ops.M_lumped.cwiseInverse().asDiagonal() * ops.S.dense());
        for (int r = 0; r < K.rows(); ++r) K(r, r) += 2.0 * unif(rng) - 1.0;
        c.K = K;
        const double nrm = K.cwiseAbs().colwise().sum().maxCoeff();
        c.t = (5.0 + 45.0 * unif(rng)) / nrm;
        c.kind = "fem-1d-advection";
    } else {
        const int nx = 3 + static_cast<int>(unif(rng) * 10);
        const Mesh m = build_rect_mesh(nx, nx, {0, 0}, {1, 1});
        BilinearFormSpec form;
        form.coeffs = CoefficientField::constant(
            Eigen::Matrix2d::Identity() * (0.05 + 0.5 * unif(rng)),
            Eigen::Vector2d(unif(rng), unif(rng)));
        const DiscreteOperators ops = build_operators(m, form);
        Mat K = -(ops.M_lumped.cwiseInverse().asDiagonal() * ops.S.dense());
        for (int r = 0; r < K.rows(); ++r) K(r, r) += 2.0 * unif(rng) - 1.0;
        c.K = K;
        const double nrm = K.cwiseAbs().colwise().sum().maxCoeff();
        c.t = (5.0 + 45.0 * unif(rng)) / nrm;
        c.kind = "fem-2d-advection";
    }
    return c;
}

bool criterion_a6(std::string& detail) {
    std::mt19937 rng(2026);
    KrylovParams kp;
    double worst_exp = 0.0, worst_phi = 0.0, worst_id = 0.0;
    int worst_n = 0;
    for (int i = 0; i < 30; ++i) {
        const OracleCase c = make_case(i, rng);
        const int n = static_cast<int>(c.K.rows());
        if (n > 200) return false;
        Vec v(n);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (int k = 0; k < n; ++k) v[k] = unif(rng);

        const OperatorAction op = matrix_action(c.K);
        const Vec we = krylov_expmv(op, c.t, v, kp);
        const Vec re = dense_expm(c.t * c.K) * v;
        const double ee = (we - re).norm() / re.norm();

        const Vec wp = krylov_phi1v(op, c.t, v, kp);
        const Vec rp = dense_phi1(c.t * c.K) * v;
        const double ep = (wp - rp).norm() / rp.norm();

        // identity residual measured against the operand scale: for strongly
        // decaying modes e^{tK}v is exponentially smaller than the terms
        // whose cancellation produces it
        const Vec id_lhs = c.t * (c.K * wp) + v;
        const double ei = (id_lhs - we).norm() / (v.norm() + we.norm());

        if (std::max(ee, ep) > std::max(worst_exp, worst_phi)) worst_n = n;
        worst_exp = std::max(worst_exp, ee);
        worst_phi = std::max(worst_phi, ep);
        worst_id = std::max(worst_id, ei);
    }
    detail = "30 operators: worst expmv rel err " + num(worst_exp, 3) + ", worst phi1v " +
             num(worst_phi, 3) + " (cap 1e-9); worst phi1 identity " + num(worst_id, 3) +
             " (cap 1e-8); worst n = " + std::to_string(worst_n);
    return worst_exp <= 1e-9 && worst_phi <= 1e-9 && worst_id <= 1e-8;
}

// --------------------------------------------------------------------- A7

bool criterion_a7(std::string& detail) {
    DiscreteOperators ops;
    ops.mesh = build_interval_mesh(0.0, 1.0, 1);
    ops.dofs.node_to_free = {0, -1};
    ops.dofs.free_to_node = {0};
    ops.M = CsrMatrix::from_triplets(1, 1, {{0, 0, 1.0}});
    ops.M_lumped = Vec::Ones(1);
    ops.S = CsrMatrix::from_triplets(1, 1, {{0, 0, 0.0}});
    ops.n = 1;

    SemilinearSystem sys;
    sys.ops = &ops;
    sys.nonlin = {[](double u) { return u * u; }, [](double u) { return 2.0 * u; },
                  [](double) { return 2.0; }, 10.0};
    Vec u0(1);
    u0 << 1.0;
    const Vec u1 = erem_step(sys, u0, 0.1, KrylovParams{});
    const double expected = (std::exp(0.2) + 1.0) / 2.0;
    const double err = std::abs(u1[0] - expected);
    detail = "u' = u^2 one step: |u1 - (e^0.2+1)/2| = " + num(err, 3) + " (cap 1e-12)";
    return err <= 1e-12;
}

// --------------------------------------------------------------------- A8

bool criterion_a8(std::string& detail) {
    const int n = 8;
    const double h = 1.0 / n;
    const Mesh m = build_interval_mesh(0.0, 1.0, n);

    const FreeDofMap all = build_free_dofs(m, BcType::neumann);
    const Mat M = assemble_mass(m, all).dense();
    double mass_err = 0.0;
    for (int i = 1; i < n; ++i) {
        mass_err = std::max(mass_err, std::abs(M(i, i - 1) - h / 6.0));
        mass_err = std::max(mass_err, std::abs(M(i, i) - 4.0 * h / 6.0));
        mass_err = std::max(mass_err, std::abs(M(i, i + 1) - h / 6.0));
    }

    const FreeDofMap interior = build_free_dofs(m, BcType::dirichlet);
    BilinearFormSpec form;
    const Mat S = assemble_stiffness(m, form, interior).dense();
    double stiff_err = 0.0;
    for (int i = 1; i < n - 2; ++i) {
        stiff_err = std::max(stiff_err, std::abs(S(i, i - 1) + 1.0 / h));
        stiff_err = std::max(stiff_err, std::abs(S(i, i) - 2.0 / h));
        stiff_err = std::max(stiff_err, std::abs(S(i, i + 1) + 1.0 / h));
    }

    // eigenvalue convergence to k^2 pi^2 over 4 refinements
    std::vector<double> hs;
    std::vector<std::vector<double>> errs(3);
    for (int nel : {8, 16, 32, 64}) {
        const Mesh mm = build_interval_mesh(0.0, 1.0, nel);
        const DiscreteOperators ops = build_operators(mm, BilinearFormSpec{});
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(ops.S.dense(), ops.M.dense());
        for (int k = 0; k < 3; ++k)
            errs[k].push_back(std::abs(ges.eigenvalues()[k] - (k + 1) * (k + 1) * pi * pi));
        hs.push_back(1.0 / nel);
    }
    bool rates_ok = true;
    std::string rates;
    for (int k = 0; k < 3; ++k) {
        std::vector<std::pair<double, double>> rows;
        for (std::size_t i = 0; i < hs.size(); ++i) rows.emplace_back(hs[i], errs[k][i]);
        const double slope = estimate_order(rows);
        rates_ok = rates_ok && slope >= 1.9 && slope <= 2.1;
        rates += (k ? ", " : "") + num(slope);
    }

    detail = "stencil max errors: mass " + num(mass_err, 3) + ", stiffness " + num(stiff_err, 3) +
             " (cap 1e-14); eigenvalue rates {" + rates + "} in [1.9, 2.1]";
    return mass_err <= 1e-14 && stiff_err <= 1e-14 && rates_ok;
}

// --------------------------------------------------------------------- A9

bool criterion_a9(std::string& detail) {
    const std::string cli = EREM_CLI_PATH;
    const std::string cfg = std::string(EREM_CONFIG_DIR) + "/a9_determinism.json";
    std::filesystem::remove_all("acceptance_out/a9_run1");
    std::filesystem::remove_all("acceptance_out/a9_run2");
    for (const char* out : {"acceptance_out/a9_run1", "acceptance_out/a9_run2"}) {
        const std::string cmd =
            cli + " --config " + cfg + " --out " + out + " > /dev/null 2>&1";
        if (std::system(cmd.c_str()) != 0) {
            detail = "CLI run failed";
            return false;
        }
    }
    const std::string a = read_file("acceptance_out/a9_run1/temporal_semilinear_1d.csv");
    const std::string b = read_file("acceptance_out/a9_run2/temporal_semilinear_1d.csv");
    detail = "two CLI runs, " + std::to_string(a.size()) + " CSV bytes, byte-identical: " +
             (a == b ? "yes" : "no");
    return !a.empty() && a == b;
}

} // namespace

int main(int argc, char** argv) {
    const std::map<std::string, std::function<bool(std::string&)>> criteria = {
        {"A1", criterion_a1}, {"A2", criterion_a2}, {"A3", criterion_a3},
        {"A4", criterion_a4}, {"A5", criterion_a5}, {"A6", criterion_a6},
        {"A7", criterion_a7}, {"A8", criterion_a8}, {"A9", criterion_a9},
    };

    std::vector<std::string> wanted;
    for (int i = 1; i < argc; ++i) wanted.emplace_back(argv[i]);
    if (wanted.empty())
        for (const auto& [name, fn] : criteria) wanted.push_back(name);

    int failures = 0;
    for (const auto& name : wanted) {
        const auto it = criteria.find(name);
        if (it == criteria.end()) {
            std::cerr << "unknown criterion " << name << '\n';
            return 2;
        }
        std::string detail;
        bool ok = false;
        try {
            ok = it->second(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::cout << name << (ok ? " PASS" : " FAIL") << " - " << detail << std::endl;
        if (!ok) ++failures;
    }
    return failures;
}
