#include "erem/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace erem {

namespace {

constexpr double pi = std::numbers::pi;

NonlinearTerm rational_reaction() {
    // f(u) = (1 - u)/(1 + u^2); sup |f'| = 1.2745... attained at u = 2 - sqrt(3)
    NonlinearTerm n;
    n.f = [](double u) { return (1.0 - u) / (1.0 + u * u); };
    n.df = [](double u) {
        const double d = 1.0 + u * u;
        return (u * u - 2.0 * u - 1.0) / (d * d);
    };
    n.d2f = [](double u) {
        const double d = 1.0 + u * u;
        return (-2.0 * u * u * u + 6.0 * u * u + 6.0 * u - 2.0) / (d * d * d);
    };
    n.lipschitz_bound = 1.3;
    return n;
}

SpaceFn step_indicator() {
    return [](double x, double) { return (x > 0.25 && x < 0.75) ? 1.0 : 0.0; };
}

} // namespace

double ProblemSpec::declared_spatial_order() const {
    switch (beta_class) {
        case BetaClass::sub1: return 1.0 + beta;
        case BetaClass::one_to_two: return beta;
        case BetaClass::two: return 2.0;
    }
    return 2.0;
}

double heat_step_coefficient(int k) {
    return 2.0 / (k * pi) * (std::cos(k * pi / 4.0) - std::cos(3.0 * k * pi / 4.0));
}

double heat_step_series(double x, double t, int min_terms) {
    if (t <= 0.0) return (x > 0.25 && x < 0.75) ? 1.0 : 0.0;
    double sum = 0.0;
    for (int k = 1; k <= 100000; ++k) {
        const double decay = std::exp(-k * k * pi * pi * t);
        sum += heat_step_coefficient(k) * decay * std::sin(k * pi * x);
        // |c_j| <= 4/pi and consecutive decay ratios shrink, so a geometric
        // bound controls the tail
        const double next = std::exp(-(k + 1.0) * (k + 1.0) * pi * pi * t);
        const double ratio = std::exp(-(2.0 * k + 3.0) * pi * pi * t);
        const double tail = 4.0 / pi * next / (1.0 - ratio);
        if (k >= min_terms && tail < 1e-13 * std::max(std::abs(sum), 1e-3)) break;
    }
    return sum;
}

ProblemSpec problem_heat_smooth_1d() {
    ProblemSpec p;
    p.name = "heat_smooth_1d";
    p.dim = 1;
    p.lo = {0.0, 0.0};
    p.hi = {1.0, 0.0};
    p.coeffs = CoefficientField::isotropic(1.0);
    p.bc = BcType::dirichlet;
    p.nonlin = NonlinearTerm::zero();
    p.u0 = [](double x, double) { return std::sin(pi * x); };
    p.T = 0.1;
    p.beta_class = BetaClass::two;
    p.beta = 2.0;
    p.exact = [](double x, double, double t) { return std::exp(-pi * pi * t) * std::sin(pi * x); };
    p.claims_clean_h2 = true;
    return p;
}

ProblemSpec problem_heat_nonsmooth_1d() {
    ProblemSpec p = problem_heat_smooth_1d();
    p.name = "heat_nonsmooth_1d";
    p.u0 = step_indicator();
    p.beta_class = BetaClass::sub1;
    p.beta = 0.5; // indicator data: in D((-A)^{beta/2}) for all beta < 1/2
    p.exact = [](double x, double, double t) { return heat_step_series(x, t); };
    p.claims_clean_h2 = false;
    return p;
}

ProblemSpec problem_semilinear_1d() {
    ProblemSpec p;
    p.name = "semilinear_1d";
    p.dim = 1;
    p.lo = {0.0, 0.0};
    p.hi = {1.0, 0.0};
    p.coeffs = CoefficientField::constant(Eigen::Matrix2d::Identity() * 0.1,
                                          Eigen::Vector2d(0.5, 0.0));
    p.bc = BcType::dirichlet;
    // constant advection with Dirichlet walls is skew-symmetric after
    // integration by parts, so the form is coercive without a shift
    p.garding_shift = 0.0;
    p.nonlin = rational_reaction();
    p.u0 = [](double x, double) { return x * (1.0 - x); };
    p.T = 1.0;
    p.beta_class = BetaClass::two;
    p.beta = 2.0;
    return p;
}

ProblemSpec problem_semilinear_1d_nonsmooth() {
    ProblemSpec p = problem_semilinear_1d();
    p.name = "semilinear_1d_nonsmooth";
    p.u0 = step_indicator();
    p.beta_class = BetaClass::sub1;
    p.beta = 0.5;
    return p;
}

ProblemSpec problem_semilinear_2d() {
    ProblemSpec p;
    p.name = "semilinear_2d";
    p.dim = 2;
    p.lo = {0.0, 0.0};
    p.hi = {1.0, 1.0};
    p.coeffs = CoefficientField::constant(Eigen::Matrix2d::Identity() * 0.1,
                                          Eigen::Vector2d(0.5, 0.3));
    p.bc = BcType::dirichlet;
    p.garding_shift = 0.0;
    p.nonlin = rational_reaction();
    p.u0 = [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
    p.T = 0.5;
    p.beta_class = BetaClass::two;
    p.beta = 2.0;
    return p;
}

ProblemSpec problem_robin_1d() {
    ProblemSpec p;
    p.name = "robin_1d";
    p.dim = 1;
    p.lo = {0.0, 0.0};
    p.hi = {1.0, 0.0};
    p.coeffs = CoefficientField::isotropic(1.0);
    p.bc = BcType::robin;
    p.alpha0 = 1.0;
    p.nonlin = NonlinearTerm::zero();
    p.u0 = [](double x, double) { return std::cos(pi * x) + 1.0; };
    p.T = 0.1;
    p.beta_class = BetaClass::one_to_two;
    p.beta = 1.0; // u0 in H^1 but violates the Robin trace condition
    return p;
}

const std::vector<std::string>& problem_registry() {
    static const std::vector<std::string> names = {
        "heat_smooth_1d",         "heat_nonsmooth_1d", "semilinear_1d",
        "semilinear_1d_nonsmooth", "semilinear_2d",     "robin_1d",
    };
    return names;
}

ProblemSpec make_problem(const std::string& name) {
    if (name == "heat_smooth_1d") return problem_heat_smooth_1d();
    if (name == "heat_nonsmooth_1d") return problem_heat_nonsmooth_1d();
    if (name == "semilinear_1d") return problem_semilinear_1d();
    if (name == "semilinear_1d_nonsmooth") return problem_semilinear_1d_nonsmooth();
    if (name == "semilinear_2d") return problem_semilinear_2d();
    if (name == "robin_1d") return problem_robin_1d();
    std::string msg = "unknown problem '" + name + "'; registry contains:";
    for (const auto& n : problem_registry()) msg += " " + n;
    throw std::invalid_argument(msg);
}

Mesh build_problem_mesh(const ProblemSpec& p, double target_h) {
    if (target_h <= 0.0) throw std::invalid_argument("build_problem_mesh: target_h <= 0");
    if (p.dim == 1) {
        const int n = std::max(1, static_cast<int>(std::llround((p.hi[0] - p.lo[0]) / target_h)));
        return build_interval_mesh(p.lo[0], p.hi[0], n);
    }
    const int nx = std::max(1, static_cast<int>(std::llround((p.hi[0] - p.lo[0]) / target_h)));
    const int ny = std::max(1, static_cast<int>(std::llround((p.hi[1] - p.lo[1]) / target_h)));
    return build_rect_mesh(nx, ny, p.lo, p.hi);
}

BilinearFormSpec bilinear_form_of(const ProblemSpec& p) {
    BilinearFormSpec form;
    form.coeffs = p.coeffs;
    form.bc = p.bc;
    form.alpha0 = p.alpha0;
    form.garding_shift = p.garding_shift;
    return form;
}

SemilinearSystem make_system(const ProblemSpec& p, const DiscreteOperators& ops, MassMode mode) {
    SemilinearSystem sys;
    sys.ops = &ops;
    sys.nonlin = p.nonlin.shifted(p.garding_shift);
    sys.mass_mode = mode;
    return sys;
}

} // namespace erem
