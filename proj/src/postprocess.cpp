#include "binghamflow/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "binghamflow/errors.hpp"

namespace bingham {

double norm_h1(const Vec& u, const AssembledOperators& ops) {
    return std::sqrt(u.dot(ops.M_vec * u) + u.dot(ops.A_vec * u));
}

double norm_wq(const Vec& theta, const Mesh& mesh, double q) {
    if (!(q > 1.0) || q > 2.0)
        throw ValidationError("norm_wq: exponent must lie in (1, 2]");
    double acc = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto grad = p1_gradients(mesh, t);
        double centroid = 0.0, gx = 0.0, gy = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double v = theta[mesh.triangles(t, k)];
            centroid += v / 3.0;
            gx += v * grad[k][0];
            gy += v * grad[k][1];
        }
        const double gnorm = std::sqrt(gx * gx + gy * gy);
        acc += mesh.tri_area[t] *
               (std::pow(std::abs(centroid), q) + std::pow(gnorm, q));
    }
    return std::pow(acc, 1.0 / q);
}

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4e", v);
    return buf;
}

}  // namespace

std::string table1_report(const std::vector<HistoryRecord>& history,
                          const std::vector<SsnLogRow>& ssn_log,
                          const std::vector<double>& sample_times) {
    (void)ssn_log;  // the records already carry the trailing delta values
    if (history.empty()) throw SampleOutOfRange("table1_report: empty history");

    double max_gap = 0.0;
    for (size_t i = 1; i < history.size(); ++i)
        max_gap = std::max(max_gap, history[i].t - history[i - 1].t);

    std::vector<const HistoryRecord*> picked;
    for (double ts : sample_times) {
        const HistoryRecord* best = nullptr;
        double best_dist = 0.0;
        for (const auto& rec : history) {
            const double dist = std::abs(rec.t - ts);
            if (!best || dist < best_dist) {
                best = &rec;
                best_dist = dist;
            }
        }
        if (best_dist > 0.5 * max_gap + 1e-12)
            throw SampleOutOfRange("table1_report: no record near t = " +
                                   std::to_string(ts));
        picked.push_back(best);
    }

    const int label_w = 8, col_w = 14;
    std::ostringstream os;
    const auto cell = [&](const std::string& s) {
        os << s;
        for (int k = static_cast<int>(s.size()); k < col_w; ++k) os << ' ';
    };
    const auto label = [&](const std::string& s) {
        os << s;
        for (int k = static_cast<int>(s.size()); k < label_w; ++k) os << ' ';
    };

    label("t");
    for (const auto* rec : picked) cell(sci(rec->t));
    os << "\n";
    for (int row = 0; row < 3; ++row) {
        label(row == 0 ? "delta" : "");
        for (const auto* rec : picked) {
            const int pad = 3 - static_cast<int>(rec->delta_last3.size());
            if (row < pad)
                cell("-");
            else
                cell(sci(rec->delta_last3[row - pad]));
        }
        os << "\n";
    }
    label("iters");
    for (const auto* rec : picked) cell(std::to_string(rec->ssn_iters));
    os << "\n";
    return os.str();
}

}  // namespace bingham
