#pragma once

#include "erem/types.hpp"

#include <functional>

namespace erem {

/// A linear operator given by its action, with a coarse norm bound used only
/// to seed substepping decisions.
struct OperatorAction {
    int dim = 0;
    double norm_estimate = 0.0;
    std::function<void(const Vec& in, Vec& out)> apply;

    Vec operator()(const Vec& v) const {
        Vec out;
        apply(v, out);
        return out;
    }
};

struct KrylovParams {
    int m_max = 60;        // maximum Arnoldi dimension
    double tol = 1e-9;     // relative accuracy target of the action
    int max_substeps = 128;
};

/// e^A by diagonal Pade of order 13 with scaling and squaring.
Mat dense_expm(const Mat& A);

/// phi1(A) = A^{-1}(e^A - I), well defined for singular A; computed from the
/// exponential of the augmented block matrix [[A, I], [0, 0]].
Mat dense_phi1(const Mat& A);

/// w ~ e^{tK} v to relative accuracy p.tol via Arnoldi with one
/// reorthogonalization pass; the generalized residual estimate controls
/// acceptance and time substepping handles failures at m_max.
Vec krylov_expmv(const OperatorAction& op, double t, const Vec& v, const KrylovParams& p);

/// w ~ phi1(tK) v with the same tolerance and substepping contract.
/// Note the caller owns scaling: an integrator consuming phi1(dt K)(dt r)
/// passes r here and multiplies the result by dt.
Vec krylov_phi1v(const OperatorAction& op, double t, const Vec& v, const KrylovParams& p);

} // namespace erem
