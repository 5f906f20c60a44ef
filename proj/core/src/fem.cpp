#include "erem/fem.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <vector>

namespace erem {

CoefficientField CoefficientField::isotropic(double q) {
    return constant(Eigen::Matrix2d::Identity() * q, Eigen::Vector2d::Zero());
}

CoefficientField CoefficientField::constant(const Eigen::Matrix2d& qd, const Eigen::Vector2d& qa) {
    CoefficientField c;
    c.q_diff = [qd](double, double) { return qd; };
    c.q_adv = [qa](double, double) { return qa; };
    return c;
}

FreeDofMap build_free_dofs(const Mesh& m, BcType bc) {
    FreeDofMap d;
    d.node_to_free.assign(m.n_nodes(), 0);
    if (bc == BcType::dirichlet) {
        for (int f = 0; f < m.n_facets(); ++f)
            for (int k = 0; k < m.dim; ++k) d.node_to_free[m.facet(f)[k]] = -1;
    }
    for (int i = 0; i < m.n_nodes(); ++i) {
        if (d.node_to_free[i] == 0) {
            d.node_to_free[i] = static_cast<int>(d.free_to_node.size());
            d.free_to_node.push_back(i);
        }
    }
    return d;
}

namespace {

// Barycentric gradients and measure of element e; grads is (dim+1) x dim.
void element_geometry(const Mesh& m, int e, double grads[3][2], double& measure,
                      double centroid[2]) {
    const int* v = m.element(e);
    if (m.dim == 1) {
        const double xa = m.nodes[v[0]][0], xb = m.nodes[v[1]][0];
        const double L = xb - xa;
        measure = std::abs(L);
        grads[0][0] = -1.0 / L;
        grads[0][1] = 0.0;
        grads[1][0] = 1.0 / L;
        grads[1][1] = 0.0;
        centroid[0] = 0.5 * (xa + xb);
        centroid[1] = 0.0;
    } else {
        const auto& p0 = m.nodes[v[0]];
        const auto& p1 = m.nodes[v[1]];
        const auto& p2 = m.nodes[v[2]];
        const double det =
            (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        measure = 0.5 * det;
        grads[0][0] = (p1[1] - p2[1]) / det;
        grads[0][1] = (p2[0] - p1[0]) / det;
        grads[1][0] = (p2[1] - p0[1]) / det;
        grads[1][1] = (p0[0] - p2[0]) / det;
        grads[2][0] = (p0[1] - p1[1]) / det;
        grads[2][1] = (p1[0] - p0[0]) / det;
        centroid[0] = (p0[0] + p1[0] + p2[0]) / 3.0;
        centroid[1] = (p0[1] + p1[1] + p2[1]) / 3.0;
    }
}

// Exact P1 mass block: (measure/6)[[2,1],[1,2]] in 1D,
// (measure/12)[[2,1,1],[1,2,1],[1,1,2]] in 2D.
double mass_entry(int dim, double measure, int i, int j) {
    if (dim == 1) return measure / 6.0 * (i == j ? 2.0 : 1.0);
    return measure / 12.0 * (i == j ? 2.0 : 1.0);
}

} // namespace

CsrMatrix assemble_mass(const Mesh& m, const FreeDofMap& dofs) {
    std::vector<std::tuple<int, int, double>> trip;
    trip.reserve(static_cast<std::size_t>(m.n_elements()) * 9);
    const int nv = m.verts_per_elem();
    for (int e = 0; e < m.n_elements(); ++e) {
        const int* v = m.element(e);
        const double measure = m.element_measure(e);
        for (int i = 0; i < nv; ++i) {
            const int fi = dofs.node_to_free[v[i]];
            if (fi < 0) continue;
            for (int j = 0; j < nv; ++j) {
                const int fj = dofs.node_to_free[v[j]];
                if (fj < 0) continue;
                trip.emplace_back(fi, fj, mass_entry(m.dim, measure, i, j));
            }
        }
    }
    return CsrMatrix::from_triplets(dofs.n_free(), dofs.n_free(), std::move(trip));
}

Vec lumped_mass(const Mesh& m, const FreeDofMap& dofs) {
    Vec d = Vec::Zero(dofs.n_free());
    const int nv = m.verts_per_elem();
    for (int e = 0; e < m.n_elements(); ++e) {
        const int* v = m.element(e);
        const double share = m.element_measure(e) / nv;
        for (int i = 0; i < nv; ++i) {
            const int fi = dofs.node_to_free[v[i]];
            if (fi >= 0) d[fi] += share;
        }
    }
    return d;
}

double sampled_ellipticity_bound(const Mesh& m, const CoefficientField& coeffs) {
    double bound = std::numeric_limits<double>::max();
    double grads[3][2], measure, c[2];
    for (int e = 0; e < m.n_elements(); ++e) {
        element_geometry(m, e, grads, measure, c);
        const Eigen::Matrix2d q = coeffs.q_diff(c[0], c[1]);
        if (m.dim == 1) {
            bound = std::min(bound, q(0, 0));
        } else {
            const Eigen::Matrix2d sym = 0.5 * (q + q.transpose());
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sym);
            bound = std::min(bound, es.eigenvalues().minCoeff());
        }
    }
    return bound;
}

CsrMatrix assemble_stiffness(const Mesh& m, const BilinearFormSpec& form, const FreeDofMap& dofs) {
    if (form.bc == BcType::neumann && form.alpha0 != 0.0)
        throw std::invalid_argument("assemble_stiffness: Neumann requires alpha0 = 0");

    const double ell = sampled_ellipticity_bound(m, form.coeffs);
    if (ell <= 0.0) {
        if (form.strict_ellipticity)
            throw std::runtime_error("assemble_stiffness: singular-coefficient "
                                     "(sampled diffusion not positive definite)");
        std::cerr << "warning: assemble_stiffness: singular-coefficient "
                     "(sampled ellipticity bound "
                  << ell << ")\n";
    }

    std::vector<std::tuple<int, int, double>> trip;
    trip.reserve(static_cast<std::size_t>(m.n_elements()) * 9);
    const int nv = m.verts_per_elem();
    double grads[3][2], measure, c[2];
    for (int e = 0; e < m.n_elements(); ++e) {
        const int* v = m.element(e);
        element_geometry(m, e, grads, measure, c);
        // midpoint quadrature for variable coefficients (exact for constants)
        const Eigen::Matrix2d q = form.coeffs.q_diff(c[0], c[1]);
        const Eigen::Vector2d b = form.coeffs.q_adv(c[0], c[1]);
        for (int i = 0; i < nv; ++i) {
            const int fi = dofs.node_to_free[v[i]];
            if (fi < 0) continue;
            for (int j = 0; j < nv; ++j) {
                const int fj = dofs.node_to_free[v[j]];
                if (fj < 0) continue;
                double diff = 0.0;
                for (int k = 0; k < m.dim; ++k)
                    for (int l = 0; l < m.dim; ++l)
                        diff += q(k, l) * grads[j][l] * grads[i][k];
                double adv = 0.0;
                for (int k = 0; k < m.dim; ++k) adv += b[k] * grads[j][k];
                double val = diff * measure + adv * measure / nv;
                if (form.garding_shift != 0.0)
                    val += form.garding_shift * mass_entry(m.dim, measure, i, j);
                trip.emplace_back(fi, fj, val);
            }
        }
    }

    // Robin boundary term alpha0 * int_{boundary} phi_j phi_i
    if (form.bc == BcType::robin && form.alpha0 != 0.0) {
        for (int f = 0; f < m.n_facets(); ++f) {
            const int* fn = m.facet(f);
            if (m.dim == 1) {
                const int fi = dofs.node_to_free[fn[0]];
                if (fi >= 0) trip.emplace_back(fi, fi, form.alpha0);
            } else {
                const double dx = m.nodes[fn[1]][0] - m.nodes[fn[0]][0];
                const double dy = m.nodes[fn[1]][1] - m.nodes[fn[0]][1];
                const double len = std::sqrt(dx * dx + dy * dy);
                for (int i = 0; i < 2; ++i) {
                    const int fi = dofs.node_to_free[fn[i]];
                    if (fi < 0) continue;
                    for (int j = 0; j < 2; ++j) {
                        const int fj = dofs.node_to_free[fn[j]];
                        if (fj < 0) continue;
                        trip.emplace_back(fi, fj, form.alpha0 * len / 6.0 * (i == j ? 2.0 : 1.0));
                    }
                }
            }
        }
    }
    return CsrMatrix::from_triplets(dofs.n_free(), dofs.n_free(), std::move(trip));
}

DiscreteOperators build_operators(const Mesh& m, const BilinearFormSpec& form) {
    DiscreteOperators ops;
    ops.mesh = m;
    ops.form = form;
    ops.dofs = build_free_dofs(m, form.bc);
    ops.M = assemble_mass(m, ops.dofs);
    ops.M_lumped = lumped_mass(m, ops.dofs);
    ops.S = assemble_stiffness(m, form, ops.dofs);
    ops.n = ops.dofs.n_free();
    return ops;
}

Vec DiscreteOperators::scatter(const Vec& free_values) const {
    Vec full = Vec::Zero(mesh.n_nodes());
    for (int i = 0; i < n; ++i) full[dofs.free_to_node[i]] = free_values[i];
    return full;
}

Vec DiscreteOperators::restrict_free(const Vec& nodal_values) const {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = nodal_values[dofs.free_to_node[i]];
    return v;
}

Vec assemble_load(const Mesh& m, const FreeDofMap& dofs, const SpaceFn& g) {
    Vec b = Vec::Zero(dofs.n_free());
    const int nv = m.verts_per_elem();
    if (m.dim == 1) {
        // 2-point Gauss, exact through cubic integrands
        const double xi[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
        for (int e = 0; e < m.n_elements(); ++e) {
            const int* v = m.element(e);
            const double xa = m.nodes[v[0]][0], xb = m.nodes[v[1]][0];
            const double w = 0.5 * std::abs(xb - xa);
            for (double s : xi) {
                const double x = xa + (xb - xa) * s;
                const double gv = g(x, 0.0) * w;
                if (const int f0 = dofs.node_to_free[v[0]]; f0 >= 0) b[f0] += gv * (1.0 - s);
                if (const int f1 = dofs.node_to_free[v[1]]; f1 >= 0) b[f1] += gv * s;
            }
        }
    } else {
        // edge-midpoint rule, exact through quadratics
        static const double bary[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
        for (int e = 0; e < m.n_elements(); ++e) {
            const int* v = m.element(e);
            const double w = m.element_measure(e) / 3.0;
            for (const auto& q : bary) {
                double x = 0.0, y = 0.0;
                for (int i = 0; i < nv; ++i) {
                    x += q[i] * m.nodes[v[i]][0];
                    y += q[i] * m.nodes[v[i]][1];
                }
                const double gv = g(x, y) * w;
                for (int i = 0; i < nv; ++i)
                    if (const int fi = dofs.node_to_free[v[i]]; fi >= 0) b[fi] += gv * q[i];
            }
        }
    }
    return b;
}

Vec cg_solve(const CsrMatrix& A, const Vec& b, double rel_tol, int max_iter) {
    const int n = A.rows;
    if (max_iter <= 0) max_iter = 10 * n + 200;
    Vec dinv = A.diagonal();
    for (int i = 0; i < n; ++i) dinv[i] = std::abs(dinv[i]) > 0.0 ? 1.0 / dinv[i] : 1.0;

    Vec x = Vec::Zero(n);
    Vec r = b;
    const double bnorm = b.norm();
    if (bnorm == 0.0) return x;
    Vec z = dinv.cwiseProduct(r);
    Vec p = z;
    double rz = r.dot(z);
    Vec Ap(n);
    for (int it = 0; it < max_iter; ++it) {
        A.multiply(p, Ap);
        const double pAp = p.dot(Ap);
        if (pAp <= 0.0) throw std::runtime_error("cg_solve: matrix not positive definite");
        const double alpha = rz / pAp;
        x += alpha * p;
        r -= alpha * Ap;
        if (r.norm() <= rel_tol * bnorm) return x;
        z = dinv.cwiseProduct(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    throw std::runtime_error("cg_solve: solver-nonconvergence");
}

Vec l2_project(const SpaceFn& g, const DiscreteOperators& ops) {
    return cg_solve(ops.M, assemble_load(ops.mesh, ops.dofs, g), 1e-12);
}

void apply_Ah(const DiscreteOperators& ops, const Vec& v, MassMode mode, Vec& out) {
    ops.S.multiply(v, out);
    out = -out;
    if (mode == MassMode::lumped) {
        out.array() /= ops.M_lumped.array();
    } else {
        out = cg_solve(ops.M, out, 1e-12);
    }
}

Vec apply_Ah(const DiscreteOperators& ops, const Vec& v, MassMode mode) {
    Vec out;
    apply_Ah(ops, v, mode, out);
    return out;
}

double l2_norm(const DiscreteOperators& ops, const Vec& v) {
    Vec Mv;
    ops.M.multiply(v, Mv);
    return std::sqrt(std::max(0.0, v.dot(Mv)));
}

double min_symmetric_eigenvalue(const CsrMatrix& S) {
    Mat d = S.dense();
    Mat sym = 0.5 * (d + d.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double eval_p1(const Mesh& m, const Vec& nodal, int e, const double* bary) {
    const int* v = m.element(e);
    double s = 0.0;
    for (int i = 0; i < m.verts_per_elem(); ++i) s += bary[i] * nodal[v[i]];
    return s;
}

} // namespace erem
