#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "binghamflow/huber.hpp"
#include "binghamflow/linalg.hpp"
#include "binghamflow/mesh.hpp"
#include "binghamflow/postprocess.hpp"

namespace bingham {

// Everything written into one legacy-VTK snapshot.
struct SnapshotFields {
    Vec u;      // 2n, block layout
    Vec p;      // per quad
    Vec theta;  // per node
    ActiveMask mask;
    Vec g_T;   // per triangle
    Vec mu_T;  // per triangle
};

// Legacy ASCII VTK unstructured grid: points, triangle cells, point-data
// velocity/temperature, cell-data pressure (per triangle from its quad),
// active mask, g_T and mu_T.  All reals with 17 significant digits.
void write_snapshot(const SnapshotFields& fields, const Mesh& mesh,
                    const std::string& path);

// Fixed column order:
// step,t,ssn_iters,delta_1,delta_2,delta_3,u_h1,theta_wq,mu_min,mu_max,g_min,g_max,active_fraction
void write_history_header(std::ostream& os);
void write_history_row(const HistoryRecord& rec, std::ostream& os);

void write_ssn_log_header(std::ostream& os);
void write_ssn_log_rows(const std::vector<SsnLogRow>& rows, std::ostream& os);

// %.17g formatting used by every writer (decimal round-trip safe).
std::string format_full(double v);

}  // namespace bingham
