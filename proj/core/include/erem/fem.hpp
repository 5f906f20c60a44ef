#pragma once

#include "erem/csr.hpp"
#include "erem/mesh.hpp"
#include "erem/types.hpp"

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace erem {

/// Variable coefficients of the elliptic operator: diffusion tensor and
/// advection field as functions of position. Only the leading dim x dim /
/// dim entries are used.
struct CoefficientField {
    std::function<Eigen::Matrix2d(double x, double y)> q_diff;
    std::function<Eigen::Vector2d(double x, double y)> q_adv;

    static CoefficientField isotropic(double q);
    static CoefficientField constant(const Eigen::Matrix2d& qd, const Eigen::Vector2d& qa);
};

/// Bilinear form a(u,v) = int q_diff grad u . grad v + (q_adv . grad u) v
/// plus alpha0 * boundary mass (Robin) plus garding_shift * domain mass.
struct BilinearFormSpec {
    CoefficientField coeffs = CoefficientField::isotropic(1.0);
    BcType bc = BcType::dirichlet;
    double alpha0 = 0.0;        // Robin coefficient; must be 0 for Neumann
    double garding_shift = 0.0; // c0 added as +c0*M to the stiffness
    bool strict_ellipticity = false; // escalate the sampled ellipticity check to an error
};

/// Mapping between mesh nodes and unconstrained dofs. Dirichlet boundary
/// nodes are eliminated; all other BC types keep every node.
struct FreeDofMap {
    std::vector<int> node_to_free; // -1 for constrained nodes
    std::vector<int> free_to_node;
    int n_free() const { return static_cast<int>(free_to_node.size()); }
};

FreeDofMap build_free_dofs(const Mesh& m, BcType bc);

/// Assembled discrete operators on the free dofs of a mesh. The discrete
/// elliptic operator acts as v -> M^{-1} (-S v); S already contains the
/// Garding shift and the Robin boundary term.
struct DiscreteOperators {
    Mesh mesh;
    BilinearFormSpec form;
    FreeDofMap dofs;
    CsrMatrix M;  // consistent mass on free dofs
    Vec M_lumped; // int phi_i (full row sums), restricted to free dofs
    CsrMatrix S;  // stiffness incl. shift and boundary terms, free dofs
    int n = 0;    // dof count

    /// Free-dof vector -> full nodal vector (zeros at constrained nodes).
    Vec scatter(const Vec& free_values) const;
    /// Full nodal vector -> free-dof vector.
    Vec restrict_free(const Vec& nodal_values) const;
};

DiscreteOperators build_operators(const Mesh& m, const BilinearFormSpec& form);

CsrMatrix assemble_mass(const Mesh& m, const FreeDofMap& dofs);
CsrMatrix assemble_stiffness(const Mesh& m, const BilinearFormSpec& form, const FreeDofMap& dofs);
Vec lumped_mass(const Mesh& m, const FreeDofMap& dofs);

/// Quadrature right-hand side b_i = int g phi_i over free dofs.
/// 2-point Gauss per element in 1D, edge-midpoint rule in 2D.
Vec assemble_load(const Mesh& m, const FreeDofMap& dofs, const SpaceFn& g);

/// L2 projection of g onto the FE space: solves M c = b by CG.
Vec l2_project(const SpaceFn& g, const DiscreteOperators& ops);

/// out = M^{-1} (-S v). Lumped mode divides by the lumped diagonal;
/// consistent mode solves with the consistent mass by CG.
void apply_Ah(const DiscreteOperators& ops, const Vec& v, MassMode mode, Vec& out);
Vec apply_Ah(const DiscreteOperators& ops, const Vec& v, MassMode mode);

/// sqrt(v' M v) with the consistent mass.
double l2_norm(const DiscreteOperators& ops, const Vec& v);

/// Jacobi-preconditioned CG for SPD systems; relative residual target.
/// Throws on non-convergence.
Vec cg_solve(const CsrMatrix& A, const Vec& b, double rel_tol = 1e-12, int max_iter = 0);

/// Smallest eigenvalue of (S + S')/2, densified; intended for modest n.
double min_symmetric_eigenvalue(const CsrMatrix& S);

/// Samples the diffusion tensor at element midpoints and returns the smallest
/// eigenvalue of its symmetric part seen; used for the ellipticity check.
double sampled_ellipticity_bound(const Mesh& m, const CoefficientField& coeffs);

/// Evaluate the P1 function with full nodal values at a point of element e
/// given barycentric weights (2 in 1D, 3 in 2D).
double eval_p1(const Mesh& m, const Vec& nodal, int e, const double* bary);

} // namespace erem
