#pragma once

#include <string>
#include <vector>

#include "binghamflow/assembly.hpp"
#include "binghamflow/linalg.hpp"
#include "binghamflow/mesh.hpp"

namespace bingham {

// One row of history.csv.  `step` is the record index: record 0 is the
// initial state, records 1 and 2 are the two init solves, later records are
// the BDF2 steps.  delta_last3 holds the last (up to three) inner-iteration
// delta values, earliest first.
struct HistoryRecord {
    int step = 0;
    double t = 0.0;
    int ssn_iters = 0;
    std::vector<double> delta_last3;
    double u_h1 = 0.0;
    double theta_wq = 0.0;
    double mu_min = 0.0, mu_max = 0.0;
    double g_min = 0.0, g_max = 0.0;
    double active_fraction = 0.0;
};

struct SsnLogRow {
    int step = 0;       // record index, matching HistoryRecord::step
    int iteration = 0;  // 1-based inner iteration
    double delta = 0.0;
};

// (u^T (M_vec + A_vec) u)^(1/2).
double norm_h1(const Vec& u, const AssembledOperators& ops);

// (sum_T |T| (|theta_T|^q + |grad theta_T|^q))^(1/q) with the centroid value
// theta_T and the constant per-triangle gradient; q must lie in (1, 2].
double norm_wq(const Vec& theta, const Mesh& mesh, double q);

// Per-sample-time column report of the last three delta values and the inner
// iteration count, in the style of a convergence table.
std::string table1_report(const std::vector<HistoryRecord>& history,
                          const std::vector<SsnLogRow>& ssn_log,
                          const std::vector<double>& sample_times);

}  // namespace bingham
