#pragma once

#include <array>
#include <functional>
#include <vector>

#include "binghamflow/linalg.hpp"
#include "binghamflow/mesh.hpp"

namespace bingham {

// Temperature-affine material laws mu(theta) = mu0 + delta_mu*theta and
// g(theta) = g0 + delta_g*theta, with the usual thermal coefficients.
// Density is fixed to 1.
struct PhysicalParams {
    double mu0 = 1.0;
    double delta_mu = 0.0;
    double g0 = 0.0;
    double delta_g = 0.0;
    double kappa = 1.0;
    double Cp = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double rho = 1.0;

    double mu(double theta) const { return mu0 + delta_mu * theta; }
    double g(double theta) const { return g0 + delta_g * theta; }

    // Positivity of mu and nonnegativity of g over theta in [0,1].
    void validate() const;
};

// Velocity coefficients use the block layout [all x components; all y
// components], so vector operators are 2n x 2n with n-sized blocks.
struct AssembledOperators {
    SpMat M_vec;    // 2n x 2n velocity mass
    SpMat M_sca;    // n x n scalar mass
    SpMat A_sca;    // n x n scalar stiffness
    SpMat A_vec;    // 2n x 2n vector Laplacian (block-diagonal A_sca)
    SpMat M_gamma;  // n x n Robin boundary mass (top edge)
    SpMat B;        // 2n x l divergence coupling, from -(p, div v)
    SpMat E;        // 4m x 2n strain operator
    Vec tri_weights;  // per-triangle areas
    Vec quad_areas;   // per-quad areas
};

AssembledOperators assemble_constant_operators(const Mesh& mesh);

// Maps velocity coefficients to per-triangle symmetrized-gradient components,
// ordered in 4 blocks of m: (E11, E12, E21, E22); E12 and E21 rows coincide.
SpMat strain_operator(const Mesh& mesh);

// A_mu = E^T * D_mu * E assembled elementwise, D_mu diagonal with mu_T*|T|
// per strain block and mu_T = mu(mean of theta at the triangle's vertices).
SpMat assemble_weighted_viscosity(const Mesh& mesh, const Vec& theta,
                                  const PhysicalParams& params);

// Q_g = E^T * D_g with D_g diagonal (4m), entry g_T*|T| per strain block.
SpMat assemble_multiplier_coupling(const Mesh& mesh, const Vec& theta,
                                   const PhysicalParams& params);

// Trilinear convection forms with the interpolated field w frozen; exact
// 3-point edge-midpoint quadrature for the P1 * grad P1 * P1 integrand.
SpMat assemble_convection_vector(const Mesh& mesh, const Vec& w);
SpMat assemble_convection_scalar(const Mesh& mesh, const Vec& w);

struct DissipationOperators {
    SpMat M1;  // P1 mass weighted per triangle by |strain|
    SpMat M2;  // P1 mass weighted per triangle by |strain|^2
    Vec Th1;   // nodal accumulation of (1/6)|T| * |strain|
    Vec Th2;   // nodal accumulation of (1/6)|T| * |strain|^2
};

DissipationOperators assemble_dissipation(const Mesh& mesh, const Vec& u,
                                          const PhysicalParams& params);

// Load vector of the rotational body force f(x1,x2) = 300*(x2-1/2, 1/2-x1).
Vec body_force_vector(const Mesh& mesh, double t);

// Constant P1 basis gradients on triangle t, one (d/dx, d/dy) pair per vertex.
std::array<std::array<double, 2>, 3> p1_gradients(const Mesh& mesh, int t);

// Generic load vectors against the P1 basis, integrated with a quadrature
// rule exact to the requested polynomial degree (1, 2 or 4).
Vec scalar_load_vector(const Mesh& mesh,
                       const std::function<double(double, double)>& s,
                       int degree);
Vec vector_load_vector(const Mesh& mesh,
                       const std::function<std::array<double, 2>(double, double)>& f,
                       int degree);

// Dirichlet velocity constraints (block-layout dof indices with prescribed
// values), imposed by row/column elimination with unit diagonal.
struct DirichletBc {
    std::vector<int> dofs;
    Vec values;
    int size() const { return static_cast<int>(dofs.size()); }
};

// u = 0 on the whole boundary (both velocity components).
DirichletBc no_slip_everywhere(const Mesh& mesh);

// Zero rows and columns of the listed dofs and place a unit diagonal.
void apply_dirichlet(SpMat& A, const DirichletBc& bc);

// Zero complete rows (used on coupling blocks whose rows live on velocity dofs).
void zero_rows(SpMat& A, const DirichletBc& bc);

// Zero complete columns (used on operators applied to velocity increments).
void zero_cols(SpMat& A, const DirichletBc& bc);

// Overwrite rhs entries at constrained dofs with the prescribed values.
void apply_dirichlet_rhs(Vec& rhs, const DirichletBc& bc);

}  // namespace bingham
