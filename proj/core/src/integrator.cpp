#include "erem/integrator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace erem {

NonlinearTerm NonlinearTerm::zero() {
    return {[](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; },
            0.0};
}

NonlinearTerm NonlinearTerm::linear(double c) {
    return {[c](double u) { return c * u; }, [c](double) { return c; },
            [](double) { return 0.0; }, std::abs(c)};
}

NonlinearTerm NonlinearTerm::shifted(double c0) const {
    if (c0 == 0.0) return *this;
    NonlinearTerm s;
    s.f = [g = f, c0](double u) { return g(u) + c0 * u; };
    s.df = [g = df, c0](double u) { return g(u) + c0; };
    s.d2f = d2f;
    s.lipschitz_bound = lipschitz_bound + std::abs(c0);
    return s;
}

namespace {

// row-wise |M_lumped^{-1} S| bound plus diagonal part: coarse operator norm
double lumped_norm_bound(const DiscreteOperators& ops) {
    double nrm = 0.0;
    for (int i = 0; i < ops.S.rows; ++i) {
        double s = 0.0;
        for (int k = ops.S.row_ptr[i]; k < ops.S.row_ptr[i + 1]; ++k)
            s += std::abs(ops.S.values[k]);
        nrm = std::max(nrm, s / ops.M_lumped[i]);
    }
    return nrm;
}

OperatorAction make_Ah_action(const DiscreteOperators& ops, MassMode mode) {
    OperatorAction a;
    a.dim = ops.n;
    a.norm_estimate = lumped_norm_bound(ops);
    a.apply = [&ops, mode](const Vec& in, Vec& out) { apply_Ah(ops, in, mode, out); };
    return a;
}

// Quadrature values of the P1 function with given full nodal values, fed to f,
// assembled as a load vector: b_i = int f(u_h) phi_i. Mirrors assemble_load
// but avoids point location by walking elements directly.
Vec assemble_composed_load(const DiscreteOperators& ops, const Vec& u_free,
                           const std::function<double(double)>& f) {
    const Mesh& m = ops.mesh;
    const Vec nodal = ops.scatter(u_free);
    Vec b = Vec::Zero(ops.n);
    if (m.dim == 1) {
        const double xi[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
        for (int e = 0; e < m.n_elements(); ++e) {
            const int* v = m.element(e);
            const double w = 0.5 * m.element_measure(e);
            for (double s : xi) {
                const double uq = (1.0 - s) * nodal[v[0]] + s * nodal[v[1]];
                const double fv = f(uq) * w;
                if (const int f0 = ops.dofs.node_to_free[v[0]]; f0 >= 0) b[f0] += fv * (1.0 - s);
                if (const int f1 = ops.dofs.node_to_free[v[1]]; f1 >= 0) b[f1] += fv * s;
            }
        }
    } else {
        static const double bary[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
        for (int e = 0; e < m.n_elements(); ++e) {
            const int* v = m.element(e);
            const double w = m.element_measure(e) / 3.0;
            for (const auto& q : bary) {
                const double uq = q[0] * nodal[v[0]] + q[1] * nodal[v[1]] + q[2] * nodal[v[2]];
                const double fv = f(uq) * w;
                for (int i = 0; i < 3; ++i)
                    if (const int fi = ops.dofs.node_to_free[v[i]]; fi >= 0) b[fi] += fv * q[i];
            }
        }
    }
    return b;
}

// df-weighted mass matrix by the same quadrature; the exact Frechet
// derivative of the quadrature-based Nemytskii projection.
CsrMatrix assemble_weighted_mass(const DiscreteOperators& ops, const Vec& u_free,
                                 const std::function<double(double)>& df) {
    const Mesh& m = ops.mesh;
    const Vec nodal = ops.scatter(u_free);
    std::vector<std::tuple<int, int, double>> trip;
    if (m.dim == 1) {
        const double xi[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
        for (int e = 0; e < m.n_elements(); ++e) {
            const int* v = m.element(e);
            const double w = 0.5 * m.element_measure(e);
            for (double s : xi) {
                const double uq = (1.0 - s) * nodal[v[0]] + s * nodal[v[1]];
                const double dfv = df(uq) * w;
                const double phi[2] = {1.0 - s, s};
                for (int i = 0; i < 2; ++i) {
                    const int fi = ops.dofs.node_to_free[v[i]];
                    if (fi < 0) continue;
                    for (int j = 0; j < 2; ++j) {
                        const int fj = ops.dofs.node_to_free[v[j]];
                        if (fj >= 0) trip.emplace_back(fi, fj, dfv * phi[i] * phi[j]);
                    }
                }
            }
        }
    } else {
        static const double bary[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
        for (int e = 0; e < m.n_elements(); ++e) {
            const int* v = m.element(e);
            const double w = m.element_measure(e) / 3.0;
            for (const auto& q : bary) {
                const double uq = q[0] * nodal[v[0]] + q[1] * nodal[v[1]] + q[2] * nodal[v[2]];
                const double dfv = df(uq) * w;
                for (int i = 0; i < 3; ++i) {
                    const int fi = ops.dofs.node_to_free[v[i]];
                    if (fi < 0) continue;
                    for (int j = 0; j < 3; ++j) {
                        const int fj = ops.dofs.node_to_free[v[j]];
                        if (fj >= 0) trip.emplace_back(fi, fj, dfv * q[i] * q[j]);
                    }
                }
            }
        }
    }
    return CsrMatrix::from_triplets(ops.n, ops.n, std::move(trip));
}

void check_finite(const Vec& u, const char* where) {
    if (!u.allFinite())
        throw std::runtime_error(std::string(where) +
                                 ": non-finite state (blow-up or violated assumptions)");
}

} // namespace

Vec nemytskii_apply(const SemilinearSystem& sys, const Vec& u) {
    const DiscreteOperators& ops = *sys.ops;
    if (u.size() != ops.n) throw std::invalid_argument("nemytskii_apply: dimension-mismatch");
    Vec out;
    if (sys.mass_mode == MassMode::lumped) {
        out = u.unaryExpr(sys.nonlin.f);
    } else {
        out = cg_solve(ops.M, assemble_composed_load(ops, u, sys.nonlin.f), 1e-12);
    }
    check_finite(out, "nemytskii_apply");
    return out;
}

OperatorAction jacobian_action(const SemilinearSystem& sys, const Vec& u_n) {
    const DiscreteOperators& ops = *sys.ops;
    OperatorAction a;
    a.dim = ops.n;
    if (sys.mass_mode == MassMode::lumped) {
        Vec d = u_n.unaryExpr(sys.nonlin.df);
        a.norm_estimate = lumped_norm_bound(ops) + d.cwiseAbs().maxCoeff();
        a.apply = [&ops, d = std::move(d)](const Vec& in, Vec& out) {
            ops.S.multiply(in, out);
            out = -out.cwiseQuotient(ops.M_lumped) + d.cwiseProduct(in);
        };
    } else {
        CsrMatrix W = assemble_weighted_mass(ops, u_n, sys.nonlin.df);
        double dmax = 0.0;
        for (int i = 0; i < u_n.size(); ++i) dmax = std::max(dmax, std::abs(sys.nonlin.df(u_n[i])));
        a.norm_estimate = lumped_norm_bound(ops) + dmax;
        a.apply = [&ops, W = std::move(W)](const Vec& in, Vec& out) {
            Vec rhs = W * in;
            Vec Sv;
            ops.S.multiply(in, Sv);
            rhs -= Sv;
            out = cg_solve(ops.M, rhs, 1e-12);
        };
    }
    return a;
}

Vec remainder_Gn(const SemilinearSystem& sys, const Vec& u_n, const Vec& u) {
    const DiscreteOperators& ops = *sys.ops;
    if (u.size() != ops.n || u_n.size() != ops.n)
        throw std::invalid_argument("remainder_Gn: dimension-mismatch");
    if (sys.mass_mode == MassMode::lumped) {
        return u.unaryExpr(sys.nonlin.f) - u_n.unaryExpr(sys.nonlin.df).cwiseProduct(u);
    }
    const CsrMatrix W = assemble_weighted_mass(ops, u_n, sys.nonlin.df);
    return cg_solve(ops.M, assemble_composed_load(ops, u, sys.nonlin.f) - W * u, 1e-12);
}

Vec erem_step(const SemilinearSystem& sys, const Vec& u_n, double dt, const KrylovParams& p) {
    const DiscreteOperators& ops = *sys.ops;
    if (dt <= 0.0) throw std::invalid_argument("erem_step: dt must be positive");
    // K_n u_n + G_n(u_n) collapses to the full right-hand side A_h u + F_h(u)
    Vec r = apply_Ah(ops, u_n, sys.mass_mode) + nemytskii_apply(sys, u_n);
    const OperatorAction K = jacobian_action(sys, u_n);
    Vec u_next = u_n + dt * krylov_phi1v(K, dt, r, p);
    check_finite(u_next, "erem_step");
    return u_next;
}

Vec exp_euler_step(const SemilinearSystem& sys, const Vec& u_n, double dt,
                   const KrylovParams& p) {
    const DiscreteOperators& ops = *sys.ops;
    if (dt <= 0.0) throw std::invalid_argument("exp_euler_step: dt must be positive");
    Vec r = apply_Ah(ops, u_n, sys.mass_mode) + nemytskii_apply(sys, u_n);
    const OperatorAction A = make_Ah_action(ops, sys.mass_mode);
    Vec u_next = u_n + dt * krylov_phi1v(A, dt, r, p);
    check_finite(u_next, "exp_euler_step");
    return u_next;
}

Vec integrate(const SemilinearSystem& sys, const Vec& u0h, const StepperConfig& cfg,
              const StepObserver& observer) {
    if (cfg.dt <= 0.0 || cfg.n_steps < 1)
        throw std::invalid_argument("integrate: invalid stepper configuration");
    Vec u = u0h;
    for (int i = 0; i < cfg.n_steps; ++i) {
        try {
            u = cfg.scheme == Scheme::erem ? erem_step(sys, u, cfg.dt, cfg.krylov)
                                           : exp_euler_step(sys, u, cfg.dt, cfg.krylov);
        } catch (const std::exception& e) {
            throw std::runtime_error("integrate: failure at step " + std::to_string(i + 1) +
                                     ": " + e.what());
        }
        if (observer) observer(i + 1, (i + 1) * cfg.dt, u);
    }
    return u;
}

} // namespace erem
