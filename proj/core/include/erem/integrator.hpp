#pragma once

#include "erem/fem.hpp"
#include "erem/matfunc.hpp"
#include "erem/types.hpp"

#include <functional>

namespace erem {

/// Pointwise reaction f with its first two derivatives and a Lipschitz bound.
struct NonlinearTerm {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> d2f;
    double lipschitz_bound = 0.0;

    static NonlinearTerm zero();
    static NonlinearTerm linear(double c);
    /// f shifted by +c0*u (Garding compensation); derivative bounds follow.
    NonlinearTerm shifted(double c0) const;
};

/// Semi-discrete system du/dt = A_h u + F_h(u). The nonlinearity must already
/// include the Garding compensation matching ops.form.garding_shift.
struct SemilinearSystem {
    const DiscreteOperators* ops = nullptr;
    NonlinearTerm nonlin;
    MassMode mass_mode = MassMode::lumped;
};

struct StepperConfig {
    double dt = 0.0;
    int n_steps = 0;
    KrylovParams krylov;
    Scheme scheme = Scheme::erem;
};

/// Called after every accepted step with (step index, time, state).
using StepObserver = std::function<void(int step, double t, const Vec& state)>;

/// Discrete Nemytskii action F_h(u). Lumped mode applies f componentwise
/// (the nodal interpolant); consistent mode L2-projects x -> f(u_h(x)) by
/// element quadrature.
Vec nemytskii_apply(const SemilinearSystem& sys, const Vec& u);

/// Combined operator K_n = A_h + J_n with J_n the exact Frechet derivative of
/// the discrete Nemytskii map frozen at u_n (diagonal df(u_n) in lumped mode,
/// mass-solve of a df-weighted mass matrix in consistent mode).
OperatorAction jacobian_action(const SemilinearSystem& sys, const Vec& u_n);

/// G_n(u) = F_h(u) - J_n u with J_n frozen at u_n.
Vec remainder_Gn(const SemilinearSystem& sys, const Vec& u_n, const Vec& u);

/// One exponential Rosenbrock-Euler step:
/// u_{n+1} = u_n + dt * phi1(dt K_n) [K_n u_n + G_n(u_n)],
/// evaluated with a single Krylov phi1 action on r = A_h u_n + F_h(u_n).
Vec erem_step(const SemilinearSystem& sys, const Vec& u_n, double dt, const KrylovParams& p);

/// First-order exponential Euler baseline (no Jacobian):
/// u_{n+1} = u_n + dt * phi1(dt A_h) [A_h u_n + F_h(u_n)].
Vec exp_euler_step(const SemilinearSystem& sys, const Vec& u_n, double dt, const KrylovParams& p);

/// Fixed-step integration from the projected initial state u0h. Throws with
/// the failing step index on Krylov failure or non-finite state.
Vec integrate(const SemilinearSystem& sys, const Vec& u0h, const StepperConfig& cfg,
              const StepObserver& observer = {});

} // namespace erem
