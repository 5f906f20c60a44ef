#pragma once

#include "erem/fem.hpp"
#include "erem/integrator.hpp"
#include "erem/mesh.hpp"
#include "erem/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace erem {

/// Smoothness class of the initial data: u0 in D((-A)^{beta/2}).
enum class BetaClass { sub1, one_to_two, two };

/// A concrete test problem: domain, operator coefficients, boundary
/// conditions, reaction term, initial data and (when available) the exact
/// solution. Immutable value object.
struct ProblemSpec {
    std::string name;
    int dim = 1;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{1.0, 0.0};
    CoefficientField coeffs = CoefficientField::isotropic(1.0);
    BcType bc = BcType::dirichlet;
    double alpha0 = 0.0;
    double garding_shift = 0.0; // c0; the reaction is compensated by +c0*u
    NonlinearTerm nonlin = NonlinearTerm::zero(); // physical f, uncompensated
    SpaceFn u0;
    double T = 0.1;
    BetaClass beta_class = BetaClass::two;
    double beta = 2.0; // declared smoothness exponent
    SpaceTimeFn exact; // empty when no closed form is available
    bool claims_clean_h2 = false; // believed to satisfy the extra smoothing condition

    bool has_exact() const { return static_cast<bool>(exact); }
    /// Order of the spatial error regime implied by beta at fixed t > 0.
    double declared_spatial_order() const;
};

ProblemSpec problem_heat_smooth_1d();
ProblemSpec problem_heat_nonsmooth_1d();
ProblemSpec problem_semilinear_1d();
ProblemSpec problem_semilinear_1d_nonsmooth();
ProblemSpec problem_semilinear_2d();
ProblemSpec problem_robin_1d();

const std::vector<std::string>& problem_registry();
ProblemSpec make_problem(const std::string& name); // throws listing the registry

/// Structured mesh with h close to target_h (exact for 1D).
Mesh build_problem_mesh(const ProblemSpec& p, double target_h);

BilinearFormSpec bilinear_form_of(const ProblemSpec& p);

/// System with the Garding-compensated reaction matching ops.
SemilinearSystem make_system(const ProblemSpec& p, const DiscreteOperators& ops,
                             MassMode mode = MassMode::lumped);

/// Sine-series solution of the 1D Dirichlet heat equation with the step
/// initial datum 1 on (1/4, 3/4): coefficients
/// c_k = (2/(k pi)) (cos(k pi/4) - cos(3 k pi/4)), truncated at a relative
/// tail below 1e-12. min_terms forces extra terms (used by truncation tests).
double heat_step_series(double x, double t, int min_terms = 0);

/// Closed-form series coefficient c_k of the step initial datum.
double heat_step_coefficient(int k);

} // namespace erem
