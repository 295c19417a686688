#pragma once

#include <array>
#include <functional>
#include <vector>

#include "binghamflow/assembly.hpp"
#include "binghamflow/config.hpp"
#include "binghamflow/huber.hpp"
#include "binghamflow/mesh.hpp"
#include "binghamflow/postprocess.hpp"
#include "binghamflow/ssn.hpp"

namespace bingham {

struct TimeGrid {
    double dt = 0.0;
    int n_steps = 0;
    double Tf = 0.0;
    double dt_rule_constant = 0.0;

    // dt = C * h^(4/5), n_steps = ceil(Tf/dt); the last step is not
    // shortened, so the reported final time is n_steps * dt.
    static TimeGrid from_rule(double C, double h, double Tf);
    void validate() const;
};

struct FieldHistory {
    Vec u_prev, u_curr;          // u_k, u_{k+1}
    Vec theta_prev, theta_curr;  // theta_k, theta_{k+1}
    Vec p_curr;
    Vec q_curr;
};

// Lag operator 2*curr - prev; exact for data linear in time.
Vec lag(const Vec& prev, const Vec& curr);

// Quadratic source a*x1^2 + b*x2^2 + c of the elliptic pre-solve.
struct Theta0Source {
    double a = 1.0 / 100.0;
    double b = 1.0 / 50.0;
    double c = 1.0 / 100.0;
};

// Solves (kappa*A_sca + Cp*beta*M_gamma) theta0 = kappa * (source, phi_i):
// Neumann on the lateral/bottom boundary, Robin on the top edge.
Vec solve_theta0(const Mesh& mesh, const AssembledOperators& ops,
                 const PhysicalParams& params, const Theta0Source& source_coeffs);
Vec solve_theta0(const Mesh& mesh, const PhysicalParams& params,
                 const Theta0Source& source_coeffs);

struct InitFlowResult {
    Vec u23, u43;  // the two backward-Euler iterates
    Vec u1, p1, q1;
    SsnState solve23, solve43;  // diagnostics of the two inner solves
};

// Two backward-Euler-type solves with the (3/(2 dt)) M scaling, both using
// the initial state in the convection lag; u1 is the average of the iterates.
InitFlowResult init_flow(const Mesh& mesh, const AssembledOperators& ops,
                         const PhysicalParams& params, const RegularizationParams& reg,
                         const Vec& theta0, const Vec& u0, const TimeGrid& grid,
                         const DirichletBc& bc,
                         const std::function<Vec(double)>& force);

// One BDF2 flow step for time level k+2: assembles Xi with A_mu(theta_in)
// frozen, builds F from the lagged convection and the mass history, and runs
// the inner semismooth Newton solve warm-started from `warm` when given.
SsnState flow_step(int k, const FieldHistory& history, const Vec& theta_in,
                   const Mesh& mesh, const AssembledOperators& ops,
                   const PhysicalParams& params, const RegularizationParams& reg,
                   const TimeGrid& grid, const DirichletBc& bc, const Vec& f_next,
                   const SsnState* warm, FlowStepProblem* problem_out = nullptr);

// One BDF2 energy step using the freshly computed u_in for the dissipation
// weights and the lagged history for convection.  extra_load, when given, is
// added to the right-hand side (manufactured-solution hook).
Vec energy_step(int k, const FieldHistory& history, const Vec& u_in,
                const Mesh& mesh, const AssembledOperators& ops,
                const PhysicalParams& params, const TimeGrid& grid,
                const Vec* extra_load = nullptr);

// Backward-Euler energy step of size dt from (theta0, u0-convection), using
// u1 in the dissipation weights; produces theta_1 for the BDF2 start.
Vec energy_init_step(const FieldHistory& history, const Vec& u_in, const Mesh& mesh,
                     const AssembledOperators& ops, const PhysicalParams& params,
                     const TimeGrid& grid, const Vec* extra_load = nullptr);

struct RunOptions {
    bool write_outputs = true;
    bool freeze_theta = false;  // skip energy steps; theta stays at theta0
};

struct RunObserver {
    std::function<void(int k, const Vec& theta_used, const FlowStepProblem& pb)> on_flow_step;
    std::function<void(int k, const Vec& u_used)> on_energy_step;
    std::function<void(const HistoryRecord& rec)> on_record;
};

struct RunResult {
    Mesh mesh;
    TimeGrid grid;
    std::vector<HistoryRecord> history;
    std::vector<SsnLogRow> ssn_log;
    Vec u_final, p_final, q_final, theta_final;
    double avg_ssn_iters = 0.0;
};

// Full outer loop: theta0 pre-solve (or constant fill), flow/energy init,
// then BDF2 steps to Tf.  With write_outputs, history.csv / ssn_log.csv are
// streamed row by row and snapshots written on the configured cadence, so a
// failed run leaves its partial history on disk.
RunResult run(const RunConfig& cfg, const RunOptions& opts = {},
              const RunObserver* observer = nullptr);

}  // namespace bingham
