#pragma once

#include <cstdint>
#include <vector>

#include "binghamflow/assembly.hpp"
#include "binghamflow/linalg.hpp"
#include "binghamflow/mesh.hpp"

namespace bingham {

struct RegularizationParams {
    double gamma = 1e3;
    void validate() const;
};

// Per-triangle yielded/rigid flags: 1 where gamma*|strain|_T >= g_T.
struct ActiveMask {
    std::vector<std::uint8_t> flags;
    int count_active() const;
    double fraction() const;
};

// Euclidean norm of the 4 components per triangle, replicated into each of
// the 4 blocks, so the output has the same 4m layout as the input.
Vec norm_N(const Vec& q);

// One norm value per triangle (the m-vector underlying norm_N).
Vec triangle_norm(const Vec& q);

// g_T = g(mean of theta at the triangle's vertices); errors on negative values.
Vec yield_on_triangles(const Mesh& mesh, const Vec& theta, const PhysicalParams& params);

// mu_T companion (used for reporting extrema and the viscosity weighting).
Vec viscosity_on_triangles(const Mesh& mesh, const Vec& theta, const PhysicalParams& params);

// Residual of the regularized constitutive law in max-equation form:
//   max(G_T, gamma*N(Eu)) .* q - gamma * G_T .* Eu
// with per-triangle scalars broadcast over the 4 blocks.
Vec max_residual(const Vec& Eu, const Vec& q, const Vec& G_T, double gamma);

// Ties (equality) are active, matching the >= in the mask definition.
ActiveMask active_mask(const Vec& Eu, const Vec& G_T, double gamma);

// Slant derivative of the replicated norm map: block (b,c) carries
// w_{c*m+t} / N(w)_t on its diagonal; rows of triangles with N(w) = 0 are
// zero (a valid slant selection at the kink).
SpMat slant_norm_derivative(const Vec& w);

// S = gamma * (chi_active * diag(q) * N_w(Eu) - diag(G_T)) * E.
// With projected = true the multiplier is first projected onto the feasible
// set, giving the modified matrix used inside the Newton solve.
SpMat build_newton_S(const SpMat& E, const Vec& Eu, const Vec& q, const Vec& G_T,
                     double gamma, const ActiveMask& mask, bool projected);

// Radial scaling of each triangle's 4-component block onto {N(q) <= G_T}.
Vec project_multiplier(const Vec& q, const Vec& G_T);

}  // namespace bingham
