#include "binghamflow/huber.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "binghamflow/errors.hpp"

namespace bingham {

void RegularizationParams::validate() const {
    if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
}

int ActiveMask::count_active() const {
    int c = 0;
    for (auto f : flags) c += (f != 0);
    return c;
}

double ActiveMask::fraction() const {
    return flags.empty() ? 0.0 : static_cast<double>(count_active()) / flags.size();
}

namespace {

int quarter_size(const Vec& q) {
    const int len = static_cast<int>(q.size());
    if (len % 4 != 0) throw ValidationError("multiplier vector length must be 4m");
    return len / 4;
}

Vec vertex_average_theta(const Mesh& mesh, const Vec& theta) {
    Vec avg(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t)
        avg[t] = (theta[mesh.triangles(t, 0)] + theta[mesh.triangles(t, 1)] +
                  theta[mesh.triangles(t, 2)]) /
                 3.0;
    return avg;
}

}  // namespace

Vec triangle_norm(const Vec& q) {
    const int m = quarter_size(q);
    Vec nrm(m);
    for (int t = 0; t < m; ++t)
        nrm[t] = std::sqrt(q[t] * q[t] + q[m + t] * q[m + t] +
                           q[2 * m + t] * q[2 * m + t] + q[3 * m + t] * q[3 * m + t]);
    return nrm;
}

Vec norm_N(const Vec& q) {
    const int m = quarter_size(q);
    const Vec nrm = triangle_norm(q);
    Vec out(4 * m);
    for (int b = 0; b < 4; ++b) out.segment(b * m, m) = nrm;
    return out;
}

Vec yield_on_triangles(const Mesh& mesh, const Vec& theta, const PhysicalParams& params) {
    const Vec avg = vertex_average_theta(mesh, theta);
    Vec g(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        g[t] = params.g(avg[t]);
        if (g[t] < 0.0)
            throw NegativeYield("yield_on_triangles: g_T < 0 on triangle " +
                                std::to_string(t));
    }
    return g;
}

Vec viscosity_on_triangles(const Mesh& mesh, const Vec& theta,
                           const PhysicalParams& params) {
    const Vec avg = vertex_average_theta(mesh, theta);
    Vec mu(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        mu[t] = params.mu(avg[t]);
        if (!(mu[t] > 0.0))
            throw NonPositiveViscosity("viscosity_on_triangles: mu_T <= 0 on triangle " +
                                       std::to_string(t));
    }
    return mu;
}

Vec max_residual(const Vec& Eu, const Vec& q, const Vec& G_T, double gamma) {
    const int m = quarter_size(Eu);
    const Vec nE = triangle_norm(Eu);
    Vec r(4 * m);
    for (int t = 0; t < m; ++t) {
        const double mx = std::max(G_T[t], gamma * nE[t]);
        for (int b = 0; b < 4; ++b)
            r[b * m + t] = mx * q[b * m + t] - gamma * G_T[t] * Eu[b * m + t];
    }
    return r;
}

ActiveMask active_mask(const Vec& Eu, const Vec& G_T, double gamma) {
    const int m = quarter_size(Eu);
    const Vec nE = triangle_norm(Eu);
    ActiveMask mask;
    mask.flags.resize(m);
    for (int t = 0; t < m; ++t) mask.flags[t] = (gamma * nE[t] >= G_T[t]) ? 1 : 0;
    return mask;
}

SpMat slant_norm_derivative(const Vec& w) {
    const int m = quarter_size(w);
    const Vec nrm = triangle_norm(w);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(16 * m);
    for (int t = 0; t < m; ++t) {
        if (nrm[t] == 0.0) continue;  // slant value zero at the kink
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                trip.emplace_back(b * m + t, c * m + t, w[c * m + t] / nrm[t]);
    }
    SpMat N(4 * m, 4 * m);
    N.setFromTriplets(trip.begin(), trip.end());
    finalize(N);
    return N;
}

SpMat build_newton_S(const SpMat& E, const Vec& Eu, const Vec& q, const Vec& G_T,
                     double gamma, const ActiveMask& mask, bool projected) {
    const int m = quarter_size(Eu);
    const Vec qe = projected ? project_multiplier(q, G_T) : q;
    const Vec nE = triangle_norm(Eu);

    // Left factor gamma*(chi diag(q) N_w - diag(G)) acts per triangle on the
    // 4 strain components, so build it as 4x4 blocks on the triangle diagonal.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(16 * m);
    for (int t = 0; t < m; ++t) {
        if (mask.flags[t] && nE[t] != 0.0) {
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c) {
                    double v = gamma * qe[b * m + t] * Eu[c * m + t] / nE[t];
                    if (b == c) v -= gamma * G_T[t];
                    if (v != 0.0) trip.emplace_back(b * m + t, c * m + t, v);
                }
        } else {
            for (int b = 0; b < 4; ++b)
                trip.emplace_back(b * m + t, b * m + t, -gamma * G_T[t]);
        }
    }
    SpMat left(4 * m, 4 * m);
    left.setFromTriplets(trip.begin(), trip.end());
    left.makeCompressed();
    SpMat S = left * E;
    finalize(S);
    return S;
}

Vec project_multiplier(const Vec& q, const Vec& G_T) {
    const int m = quarter_size(q);
    const Vec nrm = triangle_norm(q);
    Vec out = q;
    for (int t = 0; t < m; ++t) {
        if (nrm[t] > G_T[t]) {
            const double s = G_T[t] / nrm[t];
            for (int b = 0; b < 4; ++b) out[b * m + t] *= s;
        }
    }
    return out;
}

}  // namespace bingham
