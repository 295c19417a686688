#pragma once

#include <vector>

#include "binghamflow/assembly.hpp"
#include "binghamflow/huber.hpp"
#include "binghamflow/linalg.hpp"
#include "binghamflow/mesh.hpp"

namespace bingham {

struct SsnState {
    Vec u;  // 2n
    Vec p;  // l
    Vec q;  // 4m
    int iter = 0;
    std::vector<double> residual_history;  // delta per iteration
    ActiveMask mask;  // active set used in the final Newton step
};

// One implicit flow step, frozen for the whole inner solve:
//   Xi u + B p + Q_g q = F,   -B^T u = 0,
//   max(G_T, gamma N(Eu)) .* q = gamma G_T .* Eu
// with Xi = mass_scale * M_vec + A_mu(theta).  Xi, B_free, Qg_free and
// E_free carry the Dirichlet elimination (unit diagonal rows/columns, zeroed
// coupling rows/columns); B and E stay full so residuals see the prescribed
// boundary values.  F is overwritten with those values at constrained dofs.
struct FlowStepProblem {
    SpMat Xi;
    SpMat B;
    SpMat B_free;
    SpMat Q_g;     // rows at constrained dofs zeroed
    SpMat E;
    SpMat E_free;  // columns at constrained dofs zeroed
    Vec G_T;
    Vec F;
    double gamma = 0.0;

    const Mesh* mesh = nullptr;
    const AssembledOperators* ops = nullptr;
    DirichletBc bc;
};

// mass_scale is 3/(2 dt) for BDF2 and init steps; 0 gives the steady operator.
FlowStepProblem make_flow_problem(const Mesh& mesh, const AssembledOperators& ops,
                                  const PhysicalParams& params,
                                  const RegularizationParams& reg, const Vec& theta,
                                  const DirichletBc& bc, double mass_scale,
                                  const Vec& F);

// delta := |du|_H1h + |dp|_L2h + |dq|_(L2h)^4 for the combined increment.
double increment_norm(const FlowStepProblem& pb, const Vec& du, const Vec& dp,
                      const Vec& dq);

struct NewtonDelta {
    Vec du, dp, dq;
};

// One semismooth Newton step: eliminates dq through the diagonal max block,
// solves the reduced (2n + l + 1) saddle system, and back-substitutes.
NewtonDelta newton_step(const FlowStepProblem& pb, const SsnState& state);

double ssn_default_tol();  // sqrt(machine epsilon)

// Semismooth Newton iteration with the projected multiplier inside the
// Newton matrix.  Stops when delta <= tol, or immediately once the nonlinear
// residual is at rounding level (which is what a purely linear system, e.g.
// zero yield stress, produces after a single solve).
SsnState ssn_solve(const FlowStepProblem& pb, SsnState init,
                   double tol = ssn_default_tol(), int max_iter = 50);

}  // namespace bingham
