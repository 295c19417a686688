#include "binghamflow/stepper.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "binghamflow/errors.hpp"
#include "binghamflow/output.hpp"

namespace bingham {

TimeGrid TimeGrid::from_rule(double C, double h, double Tf) {
    if (!(C > 0.0)) throw ValidationError("dt rule constant must be positive");
    if (!(h > 0.0)) throw ValidationError("mesh size must be positive");
    if (!(Tf > 0.0)) throw ValidationError("final time must be positive");
    TimeGrid grid;
    grid.dt_rule_constant = C;
    grid.dt = C * std::pow(h, 0.8);
    grid.n_steps = static_cast<int>(std::ceil(Tf / grid.dt - 1e-12));
    grid.Tf = Tf;
    grid.validate();
    return grid;
}

void TimeGrid::validate() const {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    if (n_steps < 1) throw ValidationError("need at least one time step");
    if (n_steps * dt < Tf - 0.5 * dt)
        throw ValidationError("time grid does not reach the final time");
}

Vec lag(const Vec& prev, const Vec& curr) {
    if (prev.size() != curr.size())
        throw ValidationError("lag: vector lengths differ");
    return 2.0 * curr - prev;
}

Vec solve_theta0(const Mesh& mesh, const AssembledOperators& ops,
                 const PhysicalParams& params, const Theta0Source& source_coeffs) {
    if (!(params.kappa > 0.0)) throw ValidationError("solve_theta0: kappa must be positive");
    if (!(params.beta > 0.0))
        throw SingularSystem("solve_theta0: beta = 0 leaves a pure-Neumann kernel");
    const auto src = [&](double x1, double x2) {
        return source_coeffs.a * x1 * x1 + source_coeffs.b * x2 * x2 + source_coeffs.c;
    };
    const Vec load = params.kappa * scalar_load_vector(mesh, src, 4);
    SpMat H(params.kappa * ops.A_sca + (params.Cp * params.beta) * ops.M_gamma);
    finalize(H);
    return solve_spd(H, load);
}

Vec solve_theta0(const Mesh& mesh, const PhysicalParams& params,
                 const Theta0Source& source_coeffs) {
    const AssembledOperators ops = assemble_constant_operators(mesh);
    return solve_theta0(mesh, ops, params, source_coeffs);
}

InitFlowResult init_flow(const Mesh& mesh, const AssembledOperators& ops,
                         const PhysicalParams& params, const RegularizationParams& reg,
                         const Vec& theta0, const Vec& u0, const TimeGrid& grid,
                         const DirichletBc& bc,
                         const std::function<Vec(double)>& force) {
    const double scale = 3.0 / (2.0 * grid.dt);
    // Lag of the initial state collapses to the state itself.
    const Vec conv = assemble_convection_vector(mesh, u0) * u0;

    InitFlowResult out;
    {
        const Vec F = force(2.0 * grid.dt / 3.0) - conv + scale * (ops.M_vec * u0);
        const FlowStepProblem pb =
            make_flow_problem(mesh, ops, params, reg, theta0, bc, scale, F);
        SsnState init;
        init.u = u0;
        out.solve23 = ssn_solve(pb, std::move(init));
        out.u23 = out.solve23.u;
    }
    {
        const Vec F = force(4.0 * grid.dt / 3.0) - conv + scale * (ops.M_vec * out.u23);
        const FlowStepProblem pb =
            make_flow_problem(mesh, ops, params, reg, theta0, bc, scale, F);
        out.solve43 = ssn_solve(pb, out.solve23);
        out.u43 = out.solve43.u;
    }
    out.u1 = 0.5 * (out.u23 + out.u43);
    out.p1 = 0.5 * (out.solve23.p + out.solve43.p);
    out.q1 = 0.5 * (out.solve23.q + out.solve43.q);
    return out;
}

SsnState flow_step(int k, const FieldHistory& history, const Vec& theta_in,
                   const Mesh& mesh, const AssembledOperators& ops,
                   const PhysicalParams& params, const RegularizationParams& reg,
                   const TimeGrid& grid, const DirichletBc& bc, const Vec& f_next,
                   const SsnState* warm, FlowStepProblem* problem_out) {
    const Vec lagged = lag(history.u_prev, history.u_curr);
    const Vec conv = assemble_convection_vector(mesh, lagged) * lagged;
    const Vec F = f_next - conv + (2.0 / grid.dt) * (ops.M_vec * history.u_curr) -
                  (0.5 / grid.dt) * (ops.M_vec * history.u_prev);
    FlowStepProblem pb = make_flow_problem(mesh, ops, params, reg, theta_in, bc,
                                           3.0 / (2.0 * grid.dt), F);
    SsnState init;
    if (warm) init = *warm;
    SsnState result;
    try {
        result = ssn_solve(pb, std::move(init));
    } catch (Error& e) {
        throw MaxIterationsExceeded("flow step " + std::to_string(k) + ": " + e.what());
    }
    if (problem_out) *problem_out = std::move(pb);
    return result;
}

namespace {

// Shared part of the BDF2 and backward-Euler energy solves.  mass_scale is
// the coefficient of M on the left; rhs_mass already contains the history
// terms of the time discretization.
Vec energy_solve(const Vec& rhs, double mass_scale, const DissipationOperators& dis,
                 const Mesh& mesh, const AssembledOperators& ops,
                 const PhysicalParams& params, const Vec& u_in, int k) {
    SpMat H(mass_scale * ops.M_sca + params.kappa * ops.A_sca +
            params.alpha * ops.M_sca + (params.Cp * params.beta) * ops.M_gamma -
            params.delta_mu * dis.M2 - params.delta_g * dis.M1);
    finalize(H);
    try {
        return solve_spd(H, rhs);
    } catch (NonPositivePivot&) {
        const double max_strain = triangle_norm(ops.E * u_in).maxCoeff();
        std::ostringstream msg;
        msg << "energy step " << k
            << ": dissipation-shifted matrix lost positive definiteness"
            << " (max |strain| = " << max_strain << ", delta_mu = " << params.delta_mu
            << ", delta_g = " << params.delta_g
            << "); reduce delta_mu/delta_g or the time step";
        throw NonPositivePivot(msg.str());
    }
}

}  // namespace

Vec energy_step(int k, const FieldHistory& history, const Vec& u_in,
                const Mesh& mesh, const AssembledOperators& ops,
                const PhysicalParams& params, const TimeGrid& grid,
                const Vec* extra_load) {
    const DissipationOperators dis = assemble_dissipation(mesh, u_in, params);
    const Vec lag_u = lag(history.u_prev, history.u_curr);
    const Vec lag_theta = lag(history.theta_prev, history.theta_curr);
    const SpMat Cs = assemble_convection_scalar(mesh, lag_u);

    Vec rhs = -(Cs * lag_theta) +
              (2.0 * params.Cp / grid.dt) * (ops.M_sca * history.theta_curr) -
              (0.5 * params.Cp / grid.dt) * (ops.M_sca * history.theta_prev) +
              params.mu0 * dis.Th2 + params.g0 * dis.Th1;
    if (extra_load) rhs += *extra_load;
    return energy_solve(rhs, 1.5 * params.Cp / grid.dt, dis, mesh, ops, params, u_in, k);
}

Vec energy_init_step(const FieldHistory& history, const Vec& u_in, const Mesh& mesh,
                     const AssembledOperators& ops, const PhysicalParams& params,
                     const TimeGrid& grid, const Vec* extra_load) {
    const DissipationOperators dis = assemble_dissipation(mesh, u_in, params);
    const SpMat Cs = assemble_convection_scalar(mesh, history.u_curr);

    Vec rhs = -(Cs * history.theta_curr) +
              (params.Cp / grid.dt) * (ops.M_sca * history.theta_curr) +
              params.mu0 * dis.Th2 + params.g0 * dis.Th1;
    if (extra_load) rhs += *extra_load;
    return energy_solve(rhs, params.Cp / grid.dt, dis, mesh, ops, params, u_in, -1);
}

namespace {

HistoryRecord make_record(int step, double t, const SsnState* ssn, const Vec& u,
                          const Vec& theta, const Mesh& mesh,
                          const AssembledOperators& ops, const PhysicalParams& params,
                          const RegularizationParams& reg, double report_q) {
    HistoryRecord rec;
    rec.step = step;
    rec.t = t;
    if (ssn) {
        rec.ssn_iters = ssn->iter;
        const auto& hist = ssn->residual_history;
        const size_t start = hist.size() > 3 ? hist.size() - 3 : 0;
        rec.delta_last3.assign(hist.begin() + start, hist.end());
    }
    rec.u_h1 = norm_h1(u, ops);
    rec.theta_wq = norm_wq(theta, mesh, report_q);
    const Vec mu_T = viscosity_on_triangles(mesh, theta, params);
    const Vec g_T = yield_on_triangles(mesh, theta, params);
    rec.mu_min = mu_T.minCoeff();
    rec.mu_max = mu_T.maxCoeff();
    rec.g_min = g_T.minCoeff();
    rec.g_max = g_T.maxCoeff();
    rec.active_fraction = active_mask(ops.E * u, g_T, reg.gamma).fraction();
    return rec;
}

std::vector<int> snapshot_levels(const RunConfig& cfg, int n_steps) {
    std::vector<int> levels;
    const auto add = [&](int lv) {
        lv = std::min(std::max(lv, 0), n_steps);
        for (int have : levels)
            if (have == lv) return;
        levels.push_back(lv);
    };
    if (cfg.snapshot_every > 0) {
        for (int lv = 0; lv <= n_steps; lv += cfg.snapshot_every) add(lv);
        add(n_steps);
    } else {
        // About ten evenly spaced snapshots plus the quarter-points used by
        // the reference plots.
        for (int j = 0; j <= 9; ++j)
            add(static_cast<int>(std::lround(j * n_steps / 9.0)));
        add(static_cast<int>(std::lround(n_steps / 8.0)));
        add(static_cast<int>(std::lround(n_steps / 4.0)));
        add(static_cast<int>(std::lround(n_steps / 2.0)));
    }
    std::sort(levels.begin(), levels.end());
    return levels;
}

}  // namespace

RunResult run(const RunConfig& cfg, const RunOptions& opts,
              const RunObserver* observer) {
    cfg.validate();
    const PhysicalParams& params = cfg.physical;
    const RegularizationParams& reg = cfg.reg;

    RunResult result;
    result.mesh = build_cross_grid(cfg.mesh_nx, cfg.mesh_ny, cfg.x_extent, cfg.y_extent);
    const Mesh& mesh = result.mesh;
    const AssembledOperators ops = assemble_constant_operators(mesh);
    const TimeGrid grid = TimeGrid::from_rule(cfg.dt_constant, mesh.h, cfg.Tf);
    result.grid = grid;

    const int n = mesh.num_nodes();
    const DirichletBc bc = no_slip_everywhere(mesh);

    Vec theta0;
    if (cfg.theta0_mode == Theta0Mode::Elliptic)
        theta0 = solve_theta0(mesh, ops, params, Theta0Source{});
    else
        theta0 = Vec::Constant(n, cfg.theta0_value);
    const Vec u0 = Vec::Zero(2 * n);

    namespace fs = std::filesystem;
    std::ofstream history_os, log_os;
    if (opts.write_outputs) {
        fs::create_directories(fs::path(cfg.output_dir) / "snapshots");
        std::ofstream echo_os(fs::path(cfg.output_dir) / "config.echo");
        echo_config(cfg, mesh.h, grid.dt, grid.n_steps, echo_os);
        history_os.open(fs::path(cfg.output_dir) / "history.csv");
        log_os.open(fs::path(cfg.output_dir) / "ssn_log.csv");
        write_history_header(history_os);
        write_ssn_log_header(log_os);
    }

    const std::vector<int> snaps = snapshot_levels(cfg, grid.n_steps);
    const auto snapshot_due = [&](int level) {
        return std::find(snaps.begin(), snaps.end(), level) != snaps.end();
    };
    const auto write_level_snapshot = [&](int level, const Vec& u, const Vec& p,
                                          const Vec& theta) {
        if (!opts.write_outputs || !snapshot_due(level)) return;
        SnapshotFields fields;
        fields.u = u;
        fields.p = p;
        fields.theta = theta;
        fields.g_T = yield_on_triangles(mesh, theta, params);
        fields.mu_T = viscosity_on_triangles(mesh, theta, params);
        fields.mask = active_mask(ops.E * u, fields.g_T, reg.gamma);
        char name[32];
        std::snprintf(name, sizeof(name), "step_%06d.vtk", level);
        write_snapshot(fields, mesh, (fs::path(cfg.output_dir) / "snapshots" / name).string());
    };

    const auto commit = [&](const HistoryRecord& rec, const SsnState* ssn) {
        result.history.push_back(rec);
        if (ssn)
            for (size_t i = 0; i < ssn->residual_history.size(); ++i)
                result.ssn_log.push_back(
                    {rec.step, static_cast<int>(i) + 1, ssn->residual_history[i]});
        if (opts.write_outputs) {
            write_history_row(rec, history_os);
            history_os.flush();
            if (ssn) {
                std::vector<SsnLogRow> rows(result.ssn_log.end() -
                                                static_cast<long>(ssn->residual_history.size()),
                                            result.ssn_log.end());
                write_ssn_log_rows(rows, log_os);
                log_os.flush();
            }
        }
        if (observer && observer->on_record) observer->on_record(rec);
    };

    // Record 0: initial state.
    commit(make_record(0, 0.0, nullptr, u0, theta0, mesh, ops, params, reg,
                       cfg.report_q),
           nullptr);
    write_level_snapshot(0, u0, Vec::Zero(mesh.num_quads()), theta0);

    const auto force = [&](double t) { return body_force_vector(mesh, t); };
    const InitFlowResult init =
        init_flow(mesh, ops, params, reg, theta0, u0, grid, bc, force);

    // Record 1: first init solve (backward-Euler iterate at 2dt/3).
    commit(make_record(1, 2.0 * grid.dt / 3.0, &init.solve23, init.u23, theta0, mesh,
                       ops, params, reg, cfg.report_q),
           &init.solve23);

    FieldHistory hist;
    hist.u_prev = u0;
    hist.u_curr = init.u1;
    hist.theta_prev = theta0;

    Vec theta1 = theta0;
    if (!opts.freeze_theta) {
        FieldHistory init_hist;
        init_hist.u_curr = u0;
        init_hist.theta_curr = theta0;
        theta1 = energy_init_step(init_hist, init.u1, mesh, ops, params, grid);
    }
    hist.theta_curr = theta1;
    hist.p_curr = init.p1;
    hist.q_curr = init.q1;

    // Record 2: averaged init state (u_1, theta_1) at t = dt.
    commit(make_record(2, grid.dt, &init.solve43, init.u1, theta1, mesh, ops, params,
                       reg, cfg.report_q),
           &init.solve43);
    write_level_snapshot(1, init.u1, init.p1, theta1);

    SsnState warm;
    warm.u = init.u1;
    warm.p = init.p1;
    warm.q = init.q1;

    for (int k = 0; k + 2 <= grid.n_steps; ++k) {
        const double t_next = (k + 2) * grid.dt;
        const Vec f_next = body_force_vector(mesh, t_next);
        FlowStepProblem pb;
        const SsnState ssn = flow_step(k, hist, hist.theta_curr, mesh, ops, params,
                                       reg, grid, bc, f_next, &warm, &pb);
        if (observer && observer->on_flow_step)
            observer->on_flow_step(k, hist.theta_curr, pb);

        Vec theta_next = hist.theta_curr;
        if (!opts.freeze_theta) {
            theta_next = energy_step(k, hist, ssn.u, mesh, ops, params, grid);
            if (observer && observer->on_energy_step) observer->on_energy_step(k, ssn.u);
        }

        commit(make_record(k + 3, t_next, &ssn, ssn.u, theta_next, mesh, ops, params,
                           reg, cfg.report_q),
               &ssn);
        write_level_snapshot(k + 2, ssn.u, ssn.p, theta_next);

        hist.u_prev = hist.u_curr;
        hist.u_curr = ssn.u;
        hist.theta_prev = hist.theta_curr;
        hist.theta_curr = theta_next;
        hist.p_curr = ssn.p;
        hist.q_curr = ssn.q;
        warm.u = ssn.u;
        warm.p = ssn.p;
        warm.q = ssn.q;
    }

    result.u_final = hist.u_curr;
    result.p_final = hist.p_curr;
    result.q_final = hist.q_curr;
    result.theta_final = hist.theta_curr;

    long iters = 0, solves = 0;
    for (const auto& rec : result.history)
        if (rec.ssn_iters > 0) {
            iters += rec.ssn_iters;
            ++solves;
        }
    result.avg_ssn_iters = solves ? static_cast<double>(iters) / solves : 0.0;
    return result;
}

}  // namespace bingham
