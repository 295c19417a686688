#include "binghamflow/ssn.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "binghamflow/errors.hpp"

namespace bingham {

namespace {

struct IterateData {
    Vec Eu;   // 4m strains of the current iterate (full operator)
    Vec nE;   // per-triangle strain norm
    Vec m4;   // max(G_T, gamma*nE) broadcast over the 4 blocks
    ActiveMask mask;
    Vec r1, r2, r3;  // momentum, divergence, max-equation residuals
};

IterateData eval_iterate(const FlowStepProblem& pb, const SsnState& st) {
    IterateData d;
    d.Eu = pb.E * st.u;
    d.nE = triangle_norm(d.Eu);
    const int m = static_cast<int>(d.nE.size());
    d.m4.resize(4 * m);
    for (int t = 0; t < m; ++t) {
        const double mx = std::max(pb.G_T[t], pb.gamma * d.nE[t]);
        for (int b = 0; b < 4; ++b) d.m4[b * m + t] = mx;
    }
    d.mask = active_mask(d.Eu, pb.G_T, pb.gamma);
    d.r1 = pb.Xi * st.u + pb.B_free * st.p + pb.Q_g * st.q - pb.F;
    d.r2 = -(pb.B.transpose() * st.u);
    d.r3.resize(4 * m);
    for (int t = 0; t < m; ++t)
        for (int b = 0; b < 4; ++b)
            d.r3[b * m + t] = d.m4[b * m + t] * st.q[b * m + t] -
                              pb.gamma * pb.G_T[t] * d.Eu[b * m + t];
    return d;
}

double residual_norm(const IterateData& d) {
    return d.r1.lpNorm<Eigen::Infinity>() + d.r2.lpNorm<Eigen::Infinity>() +
           d.r3.lpNorm<Eigen::Infinity>();
}

NewtonDelta solve_newton_system(const FlowStepProblem& pb, const SsnState& st,
                                const IterateData& d) {
    const int len = static_cast<int>(d.m4.size());
    Vec minv(len);
    for (int i = 0; i < len; ++i) minv[i] = (d.m4[i] > 0.0) ? 1.0 / d.m4[i] : 0.0;

    const SpMat Shat =
        build_newton_S(pb.E_free, d.Eu, st.q, pb.G_T, pb.gamma, d.mask, true);
    const SpMat scaled = minv.asDiagonal() * Shat;
    SpMat A_red = pb.Xi - SpMat(pb.Q_g * scaled);
    finalize(A_red);

    SaddleSystem sys;
    sys.A_block = std::move(A_red);
    sys.B_block = pb.B_free;
    sys.rhs_u = -d.r1 + pb.Q_g * minv.cwiseProduct(d.r3);
    sys.rhs_p = d.r2;
    sys.mean_constraint = pb.ops->quad_areas;

    NewtonDelta nd;
    std::tie(nd.du, nd.dp) = solve_saddle(sys);
    nd.dq = minv.cwiseProduct(-d.r3 - Shat * nd.du);
    return nd;
}

}  // namespace

FlowStepProblem make_flow_problem(const Mesh& mesh, const AssembledOperators& ops,
                                  const PhysicalParams& params,
                                  const RegularizationParams& reg, const Vec& theta,
                                  const DirichletBc& bc, double mass_scale,
                                  const Vec& F) {
    reg.validate();
    FlowStepProblem pb;
    pb.mesh = &mesh;
    pb.ops = &ops;
    pb.bc = bc;
    pb.gamma = reg.gamma;
    pb.G_T = yield_on_triangles(mesh, theta, params);

    SpMat Xi_full = assemble_weighted_viscosity(mesh, theta, params);
    if (mass_scale != 0.0) Xi_full = SpMat(Xi_full + mass_scale * ops.M_vec);

    // Fold prescribed boundary values into the right-hand side, then
    // eliminate the constrained rows/columns.
    Vec F_adj = F;
    if (bc.size() > 0 && bc.values.cwiseAbs().maxCoeff() > 0.0) {
        Vec lift = Vec::Zero(2 * mesh.num_nodes());
        for (int k = 0; k < bc.size(); ++k) lift[bc.dofs[k]] = bc.values[k];
        F_adj -= Xi_full * lift;
    }
    pb.Xi = std::move(Xi_full);
    apply_dirichlet(pb.Xi, bc);

    pb.B = ops.B;
    pb.B_free = ops.B;
    zero_rows(pb.B_free, bc);
    pb.E = ops.E;
    pb.E_free = ops.E;
    zero_cols(pb.E_free, bc);
    pb.Q_g = assemble_multiplier_coupling(mesh, theta, params);
    zero_rows(pb.Q_g, bc);

    apply_dirichlet_rhs(F_adj, bc);
    pb.F = std::move(F_adj);
    return pb;
}

double increment_norm(const FlowStepProblem& pb, const Vec& du, const Vec& dp,
                      const Vec& dq) {
    const AssembledOperators& ops = *pb.ops;
    const double h1 = std::sqrt(du.dot(ops.M_vec * du) + du.dot(ops.A_vec * du));
    const double l2p = std::sqrt(dp.cwiseAbs2().dot(ops.quad_areas));
    const int m = static_cast<int>(ops.tri_weights.size());
    double acc = 0.0;
    for (int t = 0; t < m; ++t)
        for (int b = 0; b < 4; ++b)
            acc += ops.tri_weights[t] * dq[b * m + t] * dq[b * m + t];
    return h1 + l2p + std::sqrt(acc);
}

NewtonDelta newton_step(const FlowStepProblem& pb, const SsnState& state) {
    return solve_newton_system(pb, state, eval_iterate(pb, state));
}

double ssn_default_tol() { return std::sqrt(std::numeric_limits<double>::epsilon()); }

SsnState ssn_solve(const FlowStepProblem& pb, SsnState init, double tol,
                   int max_iter) {
    const int n2 = static_cast<int>(pb.Xi.rows());
    const int l = static_cast<int>(pb.B.cols());
    const int m4 = static_cast<int>(pb.E.rows());

    SsnState st = std::move(init);
    if (st.u.size() != n2) st.u = Vec::Zero(n2);
    if (st.p.size() != l) st.p = Vec::Zero(l);
    if (st.q.size() != m4) st.q = Vec::Zero(m4);
    for (int k = 0; k < pb.bc.size(); ++k) st.u[pb.bc.dofs[k]] = pb.bc.values[k];
    st.iter = 0;
    st.residual_history.clear();

    // An exactly linear step (zero yield stress) solves in one iteration and
    // leaves the nonlinear residual at rounding level; this floor detects it.
    const double linear_floor = 1e-12 * (1.0 + pb.F.lpNorm<Eigen::Infinity>());

    IterateData data = eval_iterate(pb, st);
    for (int it = 1; it <= max_iter; ++it) {
        const ActiveMask mask_used = data.mask;
        const NewtonDelta nd = solve_newton_system(pb, st, data);
        st.u += nd.du;
        st.p += nd.dp;
        st.q += nd.dq;
        const double delta = increment_norm(pb, nd.du, nd.dp, nd.dq);
        st.residual_history.push_back(delta);
        st.iter = it;
        st.mask = mask_used;
        data = eval_iterate(pb, st);
        if (delta <= tol || residual_norm(data) <= linear_floor) return st;
    }

    std::ostringstream msg;
    msg << "ssn_solve: no convergence in " << max_iter << " iterations; delta history:";
    for (double dlt : st.residual_history) msg << " " << dlt;
    throw MaxIterationsExceeded(msg.str());
}

}  // namespace bingham
