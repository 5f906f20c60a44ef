#include <doctest.h>

#include "erem/fem.hpp"
#include "erem/mesh.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace erem;
namespace {
constexpr double pi = std::numbers::pi;

BilinearFormSpec laplace_form(BcType bc, double q = 1.0, double adv = 0.0, double c0 = 0.0,
                              double alpha0 = 0.0) {
    BilinearFormSpec f;
    f.coeffs = CoefficientField::constant(Eigen::Matrix2d::Identity() * q,
                                          Eigen::Vector2d(adv, 0.0));
    f.bc = bc;
    f.alpha0 = alpha0;
    f.garding_shift = c0;
    return f;
}
} // namespace

TEST_SUITE_BEGIN("fem");

TEST_CASE("1d mass stencil (h/6)[1,4,1] and partition of unity") {
    const int n = 8;
    const double h = 1.0 / n;
    const Mesh m = build_interval_mesh(0.0, 1.0, n);
    const FreeDofMap dofs = build_free_dofs(m, BcType::neumann);
    const CsrMatrix M = assemble_mass(m, dofs);
    const Mat D = M.dense();
    for (int i = 1; i < n; ++i) {
        CHECK(std::abs(D(i, i - 1) - h / 6.0) <= 1e-14);
        CHECK(std::abs(D(i, i) - 4.0 * h / 6.0) <= 1e-14);
        CHECK(std::abs(D(i, i + 1) - h / 6.0) <= 1e-14);
    }
    CHECK(D.sum() == doctest::Approx(1.0).epsilon(1e-13)); // = |domain|
    // lumped diagonal equals full row sums for the unconstrained assembly
    const Vec lump = lumped_mass(m, dofs);
    const Vec rs = M.row_sums();
    for (int i = 0; i <= n; ++i) CHECK(std::abs(lump[i] - rs[i]) <= 1e-15);
}

TEST_CASE("unit square 1x1 mass: trace and total") {
    const Mesh m = build_rect_mesh(1, 1, {0, 0}, {1, 1});
    const FreeDofMap dofs = build_free_dofs(m, BcType::neumann);
    const Mat D = assemble_mass(m, dofs).dense();
    REQUIRE(D.rows() == 4);
    // per-triangle block (area/12)[[2,1,1],[1,2,1],[1,1,2]]; diagonal corners
    // sit in two triangles, the off-diagonal corners in one
    CHECK(D.trace() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(D.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("1d stiffness stencil (1/h)[-1,2,-1] on free dofs") {
    const int n = 8;
    const double h = 1.0 / n;
    const Mesh m = build_interval_mesh(0.0, 1.0, n);
    const FreeDofMap dofs = build_free_dofs(m, BcType::dirichlet);
    REQUIRE(dofs.n_free() == n - 1);
    const Mat S = assemble_stiffness(m, laplace_form(BcType::dirichlet), dofs).dense();
    for (int i = 1; i < n - 2; ++i) {
        CHECK(std::abs(S(i, i - 1) + 1.0 / h) <= 1e-12);
        CHECK(std::abs(S(i, i) - 2.0 / h) <= 1e-12);
        CHECK(std::abs(S(i, i + 1) + 1.0 / h) <= 1e-12);
    }
}

TEST_CASE("constant advection adds the antisymmetric (b/2)[-1,0,1] stencil") {
    const int n = 8;
    const double b = 0.7;
    const Mesh m = build_interval_mesh(0.0, 1.0, n);
    const FreeDofMap dofs = build_free_dofs(m, BcType::dirichlet);
    const Mat S0 = assemble_stiffness(m, laplace_form(BcType::dirichlet), dofs).dense();
    const Mat Sb = assemble_stiffness(m, laplace_form(BcType::dirichlet, 1.0, b), dofs).dense();
    const Mat A = Sb - S0;
    for (int i = 1; i < n - 2; ++i) {
        CHECK(std::abs(A(i, i - 1) + b / 2.0) <= 1e-14);
        CHECK(std::abs(A(i, i)) <= 1e-14);
        CHECK(std::abs(A(i, i + 1) - b / 2.0) <= 1e-14);
    }
}

TEST_CASE("Robin with alpha0 = 0 equals Neumann assembly exactly") {
    const Mesh m = build_rect_mesh(3, 3, {0, 0}, {1, 1});
    const FreeDofMap dofs = build_free_dofs(m, BcType::neumann);
    const Mat Sn = assemble_stiffness(m, laplace_form(BcType::neumann), dofs).dense();
    const Mat Sr = assemble_stiffness(m, laplace_form(BcType::robin), dofs).dense();
    CHECK((Sn - Sr).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("1d Robin boundary term is alpha0 at the boundary diagonals") {
    const int n = 6;
    const double alpha0 = 1.7;
    const Mesh m = build_interval_mesh(0.0, 1.0, n);
    const FreeDofMap dofs = build_free_dofs(m, BcType::neumann);
    const Mat Sn = assemble_stiffness(m, laplace_form(BcType::neumann), dofs).dense();
    const Mat Sr =
        assemble_stiffness(m, laplace_form(BcType::robin, 1.0, 0.0, 0.0, alpha0), dofs).dense();
    Mat diff = Sr - Sn;
    CHECK(std::abs(diff(0, 0) - alpha0) <= 1e-14);
    CHECK(std::abs(diff(n, n) - alpha0) <= 1e-14);
    diff(0, 0) = diff(n, n) = 0.0;
    CHECK(diff.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("l2_project is the identity on FE data") {
    const Mesh m = build_interval_mesh(0.0, 1.0, 16);
    const DiscreteOperators ops = build_operators(m, laplace_form(BcType::neumann));
    SUBCASE("linear function") {
        const Vec c = l2_project([](double x, double) { return 3.0 * x - 1.0; }, ops);
        for (int i = 0; i < ops.n; ++i)
            CHECK(c[i] == doctest::Approx(3.0 * m.nodes[i][0] - 1.0).epsilon(1e-10));
    }
    SUBCASE("constant one") {
        const Vec c = l2_project([](double, double) { return 1.0; }, ops);
        for (int i = 0; i < ops.n; ++i) CHECK(c[i] == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("l2_project of the step function integrates to 1/2") {
    auto step = [](double x, double) { return (x > 0.25 && x < 0.75) ? 1.0 : 0.0; };
    SUBCASE("jumps at mesh nodes: exact") {
        const Mesh m = build_interval_mesh(0.0, 1.0, 64);
        const DiscreteOperators ops = build_operators(m, laplace_form(BcType::neumann));
        const Vec c = l2_project(step, ops);
        // (P_h g, 1) = (g, 1) when constants lie in the space
        const double integral = (ops.M * c).sum();
        CHECK(integral == doctest::Approx(0.5).epsilon(1e-11));
    }
    SUBCASE("jumps inside elements: O(h^2)") {
        const Mesh m = build_interval_mesh(0.0, 1.0, 54);
        const DiscreteOperators ops = build_operators(m, laplace_form(BcType::neumann));
        const Vec c = l2_project(step, ops);
        const double integral = (ops.M * c).sum();
        CHECK(std::abs(integral - 0.5) <= 1.0 / (54.0 * 54.0));
    }
}

TEST_CASE("apply_Ah on discrete eigenmodes matches the generalized eigensolve") {
    const int n = 32;
    const Mesh m = build_interval_mesh(0.0, 1.0, n);
    const DiscreteOperators ops = build_operators(m, laplace_form(BcType::dirichlet));
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(ops.S.dense(), ops.M.dense());
    REQUIRE(ges.info() == Eigen::Success);
    for (int k = 0; k < 3; ++k) {
        const Vec v = ges.eigenvectors().col(k);
        const double lambda = ges.eigenvalues()[k];
        const Vec Av = apply_Ah(ops, v, MassMode::consistent);
        CHECK((Av + lambda * v).norm() <= 1e-8 * lambda * v.norm());
    }
    SUBCASE("zero maps to zero") {
        const Vec z = Vec::Zero(ops.n);
        CHECK(apply_Ah(ops, z, MassMode::lumped).norm() == 0.0);
    }
}

TEST_CASE("lumped and consistent apply_Ah agree to O(h^2) on smooth data") {
    std::vector<std::pair<double, double>> rows;
    for (int n : {16, 32, 64, 128}) {
        const Mesh m = build_interval_mesh(0.0, 1.0, n);
        const DiscreteOperators ops = build_operators(m, laplace_form(BcType::dirichlet));
        const Vec v = l2_project([](double x, double) { return std::sin(pi * x); }, ops);
        const Vec d = apply_Ah(ops, v, MassMode::lumped) - apply_Ah(ops, v, MassMode::consistent);
        rows.emplace_back(1.0 / n, l2_norm(ops, d));
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double ratio = rows[i - 1].second / rows[i].second;
        CHECK(ratio > 3.4);
        CHECK(ratio < 4.6);
    }
}

TEST_CASE("l2_norm basics") {
    const Mesh m = build_interval_mesh(0.0, 1.0, 128);
    const DiscreteOperators ops = build_operators(m, laplace_form(BcType::neumann));
    CHECK(l2_norm(ops, Vec::Zero(ops.n)) == 0.0);
    CHECK(l2_norm(ops, Vec::Ones(ops.n)) == doctest::Approx(1.0).epsilon(1e-12));
    Vec s(ops.n);
    for (int i = 0; i < ops.n; ++i) s[i] = std::sin(pi * m.nodes[i][0]);
    CHECK(std::abs(l2_norm(ops, s) - std::sqrt(0.5)) <= 2.0 / (128.0 * 128.0));
}

TEST_CASE("Galerkin adjoint bookkeeping with advection") {
    const Mesh m = build_interval_mesh(0.0, 1.0, 24);
    const DiscreteOperators ops =
        build_operators(m, laplace_form(BcType::dirichlet, 0.3, 1.1));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vec u(ops.n), v(ops.n);
    for (int i = 0; i < ops.n; ++i) {
        u[i] = dist(rng);
        v[i] = dist(rng);
    }
    const Vec Au = apply_Ah(ops, u, MassMode::consistent);
    const double lhs = Au.dot(ops.M * v);
    const double rhs = -(ops.S * u).dot(v);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
}

TEST_CASE("coercivity of the shipped forms and the Garding shift") {
    SUBCASE("pure diffusion, Dirichlet") {
        const Mesh m = build_interval_mesh(0.0, 1.0, 100);
        const auto ops = build_operators(m, laplace_form(BcType::dirichlet));
        CHECK(min_symmetric_eigenvalue(ops.S) >= -1e-10);
    }
    SUBCASE("Dirichlet walls make constant advection skew-symmetric") {
        const Mesh m = build_interval_mesh(0.0, 1.0, 100);
        const auto ops = build_operators(m, laplace_form(BcType::dirichlet, 0.1, 0.5));
        CHECK(min_symmetric_eigenvalue(ops.S) >= -1e-10);
    }
    SUBCASE("Neumann advection needs a shift; c0 = 2.5 > b^2/4 restores it") {
        const Mesh m = build_interval_mesh(0.0, 1.0, 100);
        const auto bad = build_operators(m, laplace_form(BcType::neumann, 1.0, 3.0));
        CHECK(min_symmetric_eigenvalue(bad.S) < 0.0);
        const auto good = build_operators(m, laplace_form(BcType::neumann, 1.0, 3.0, 2.5));
        CHECK(min_symmetric_eigenvalue(good.S) >= -1e-10);
    }
}

TEST_CASE("generalized eigenvalues converge to k^2 pi^2 at rate 2") {
    // independent oracle for the discrete operator: dense eigensolve per level
    std::vector<std::vector<double>> errs(3);
    std::vector<double> hs;
    for (int n : {8, 16, 32, 64}) {
        const Mesh m = build_interval_mesh(0.0, 1.0, n);
        const DiscreteOperators ops = build_operators(m, laplace_form(BcType::dirichlet));
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(ops.S.dense(), ops.M.dense());
        for (int k = 0; k < 3; ++k)
            errs[k].push_back(std::abs(ges.eigenvalues()[k] - (k + 1) * (k + 1) * pi * pi));
        hs.push_back(1.0 / n);
    }
    for (int k = 0; k < 3; ++k) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < hs.size(); ++i) {
            const double x = std::log(hs[i]), y = std::log(errs[k][i]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        const double n = static_cast<double>(hs.size());
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
    }
}

TEST_CASE("ellipticity sampling flags indefinite coefficients") {
    const Mesh m = build_interval_mesh(0.0, 1.0, 8);
    BilinearFormSpec bad = laplace_form(BcType::dirichlet, -1.0);
    CHECK(sampled_ellipticity_bound(m, bad.coeffs) < 0.0);
    bad.strict_ellipticity = true;
    const FreeDofMap dofs = build_free_dofs(m, bad.bc);
    CHECK_THROWS_WITH_AS(assemble_stiffness(m, bad, dofs),
                         doctest::Contains("singular-coefficient"), std::runtime_error);
}

TEST_CASE("coordinate-format matrix dump") {
    const Mesh m = build_interval_mesh(0.0, 1.0, 2);
    const CsrMatrix M = assemble_mass(m, build_free_dofs(m, BcType::neumann));
    std::ostringstream os;
    M.dump_coordinate(os);
    std::istringstream is(os.str());
    int r, c;
    double v;
    int count = 0;
    double sum = 0.0;
    while (is >> r >> c >> v) {
        ++count;
        sum += v;
    }
    CHECK(count == M.nnz());
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("cg reports non-convergence as an error") {
    // indefinite matrix: CG is not applicable and must not pretend success
    CsrMatrix A = CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, -1.0}});
    Vec b(2);
    b << 1.0, 1.0;
    CHECK_THROWS_AS(cg_solve(A, b, 1e-14, 10), std::runtime_error);
}

TEST_SUITE_END();
