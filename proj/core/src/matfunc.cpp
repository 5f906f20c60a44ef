#include "erem/matfunc.hpp"

#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

namespace erem {

namespace {

// diagonal Pade coefficients of degree 13
const double pade13[14] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                           1187353796428800.0,  129060195264000.0,   10559470521600.0,
                           670442572800.0,      33522128640.0,       1323241920.0,
                           40840800.0,          960960.0,            16380.0,
                           182.0,               1.0};
const double theta13 = 5.371920351148152;

} // namespace

Mat dense_expm(const Mat& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("dense_expm: matrix not square");
    if (!A.allFinite()) throw std::invalid_argument("dense_expm: non-finite entries");
    const auto n = A.rows();
    if (n == 0) return Mat(0, 0);

    const double nrm = A.cwiseAbs().colwise().sum().maxCoeff(); // 1-norm
    int squarings = 0;
    if (nrm > theta13) squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    const Mat As = A * std::ldexp(1.0, -squarings);

    const Mat I = Mat::Identity(n, n);
    const Mat A2 = As * As;
    const Mat A4 = A2 * A2;
    const Mat A6 = A2 * A4;
    const Mat U = As * (A6 * (pade13[13] * A6 + pade13[11] * A4 + pade13[9] * A2) +
                        pade13[7] * A6 + pade13[5] * A4 + pade13[3] * A2 + pade13[1] * I);
    const Mat V = A6 * (pade13[12] * A6 + pade13[10] * A4 + pade13[8] * A2) +
                  pade13[6] * A6 + pade13[4] * A4 + pade13[2] * A2 + pade13[0] * I;

    Mat R = (V - U).partialPivLu().solve(V + U);
    for (int k = 0; k < squarings; ++k) R = R * R;
    if (!R.allFinite())
        throw std::runtime_error("dense_expm: overflow (entries too large in magnitude)");
    return R;
}

Mat dense_phi1(const Mat& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("dense_phi1: matrix not square");
    const auto n = A.rows();
    if (n == 0) return Mat(0, 0);
    Mat aug = Mat::Zero(2 * n, 2 * n);
    aug.topLeftCorner(n, n) = A;
    aug.topRightCorner(n, n) = Mat::Identity(n, n);
    return dense_expm(aug).topRightCorner(n, n);
}

namespace {

struct KrylovAttempt {
    bool converged = false;
    Vec w;
};

// One Arnoldi approximation of e^{tK}v (phi1 = false) or phi1(tK)v
// (phi1 = true). Acceptance uses the generalized residual estimate from the
// phi-augmented small exponential; a lucky breakdown is exact and accepted.
KrylovAttempt
attempt_matfunc(const OperatorAction& op, double t, const Vec& v, int m_max, double rel_tol,
                bool phi1) {
    KrylovAttempt res;
    const int n = op.dim;
    const double beta = v.norm();
    if (beta == 0.0) {
        res.converged = true;
        res.w = Vec::Zero(n);
        return res;
    }
    const int m_eff = std::min(m_max, n);
    Mat V(n, m_eff);
    Mat H = Mat::Zero(m_eff + 1, m_eff);
    V.col(0) = v / beta;

    Vec w(n), h, h2;
    for (int j = 0; j < m_eff; ++j) {
        op.apply(V.col(j), w);
        if (!w.allFinite())
            throw std::runtime_error("krylov: non-finite operator output (blow-up)");
        const double pre_norm = w.norm();
        // classical Gram-Schmidt with one reorthogonalization pass
        auto Vj = V.leftCols(j + 1);
        h = Vj.transpose() * w;
        w.noalias() -= Vj * h;
        h2 = Vj.transpose() * w;
        w.noalias() -= Vj * h2;
        h += h2;
        const double hnext = w.norm();
        H.col(j).head(j + 1) = h;
        H(j + 1, j) = hnext;

        const int m = j + 1;
        const bool happy = hnext <= 1e-14 * std::max(1.0, pre_norm);
        const bool check = happy || m <= 4 || m % 4 == 0 || m == m_eff;
        if (check) {
            // exp of [[tH, e1, 0], [0, 0, 1], [0, 0, 0]] carries e^{tH},
            // phi1(tH)e1 and phi2(tH)e1; the phi column one past the result
            // gives the leading term of the residual expansion.
            Mat aug = Mat::Zero(m + 2, m + 2);
            aug.topLeftCorner(m, m) = t * H.topLeftCorner(m, m);
            aug(0, m) = 1.0;
            aug(m, m + 1) = 1.0;
            const Mat F = dense_expm(aug);
            Vec coeff = phi1 ? Vec(F.block(0, m, m, 1)) : Vec(F.topLeftCorner(m, m).col(0));
            const double est =
                beta * hnext * std::abs(t) * std::abs(F(m - 1, phi1 ? m + 1 : m));
            const double scale = beta * std::max(coeff.norm(), 1e-30);
            if (happy || est <= 0.25 * rel_tol * scale) {
                res.converged = true;
                res.w = beta * (V.leftCols(m) * coeff);
                return res;
            }
        }
        if (happy) break;
        if (j + 1 < m_eff) V.col(j + 1) = w / H(j + 1, j);
    }
    return res;
}

int seed_substeps(double t, double norm_estimate, const KrylovParams& p) {
    // per-substep stiffness t*||K|| that an m_max-dimensional Krylov space
    // can resolve to tol: superlinear convergence needs roughly
    // m^2 >= (5/4) * t*||K|| * log(10/tol)
    const double target = std::max(16.0, 0.5 * p.m_max * p.m_max / std::log(10.0 / p.tol));
    const double work = t * std::max(0.0, norm_estimate);
    if (!(work > target)) return 1;
    const double ns = std::ceil(work / target);
    // compare in double: the cast would overflow for violently stiff operators
    if (ns >= static_cast<double>(p.max_substeps)) return p.max_substeps;
    return static_cast<int>(ns);
}

void validate_action_input(const OperatorAction& op, double t, const Vec& v,
                           const KrylovParams& p) {
    if (!op.apply) throw std::invalid_argument("krylov: operator has no action");
    if (v.size() != op.dim) throw std::invalid_argument("krylov: dimension-mismatch");
    if (t < 0.0) throw std::invalid_argument("krylov: negative time");
    if (!v.allFinite()) throw std::invalid_argument("krylov: non-finite input vector");
    if (p.m_max < 2 || !(p.tol > 0.0) || p.tol >= 1.0 || p.max_substeps < 1)
        throw std::invalid_argument("krylov: invalid parameters");
}

} // namespace

Vec krylov_expmv(const OperatorAction& op, double t, const Vec& v, const KrylovParams& p) {
    validate_action_input(op, t, v, p);
    if (t == 0.0 || v.norm() == 0.0) return v;

    int ns = seed_substeps(t, op.norm_estimate, p);
    while (true) {
        const double s = t / ns;
        const double tol_local = p.tol / ns;
        Vec w = v;
        bool ok = true;
        for (int i = 0; i < ns; ++i) {
            KrylovAttempt att = attempt_matfunc(op, s, w, p.m_max, tol_local, false);
            if (!att.converged) {
                ok = false;
                break;
            }
            w = std::move(att.w);
        }
        if (ok) return w;
        if (ns >= p.max_substeps)
            throw std::runtime_error("krylov_expmv: no-convergence (substep cap reached)");
        ns = std::min(2 * ns, p.max_substeps);
    }
}

Vec krylov_phi1v(const OperatorAction& op, double t, const Vec& v, const KrylovParams& p) {
    validate_action_input(op, t, v, p);
    if (t == 0.0) return v; // phi1(0) = I
    if (v.norm() == 0.0) return Vec::Zero(op.dim);

    int ns = seed_substeps(t, op.norm_estimate, p);
    while (true) {
        const double s = t / ns;
        const double tol_local = p.tol / ns;
        // y solves y' = K y + v, y(0) = 0; then phi1(tK)v = y(t)/t.
        KrylovAttempt src = attempt_matfunc(op, s, v, p.m_max, tol_local, true);
        bool ok = src.converged;
        if (ok) {
            Vec y = s * src.w;
            for (int i = 1; i < ns && ok; ++i) {
                KrylovAttempt att = attempt_matfunc(op, s, y, p.m_max, tol_local, false);
                ok = att.converged;
                if (ok) y = att.w + s * src.w;
            }
            if (ok) return y / t;
        }
        if (ns >= p.max_substeps)
            throw std::runtime_error("krylov_phi1v: no-convergence (substep cap reached)");
        ns = std::min(2 * ns, p.max_substeps);
    }
}

} // namespace erem
