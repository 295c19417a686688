#include "binghamflow/assembly.hpp"

#include <cmath>
#include <vector>

#include "binghamflow/errors.hpp"

namespace bingham {

namespace {

using Triplet = Eigen::Triplet<double>;

struct TriGeometry {
    std::array<int, 3> v;
    std::array<std::array<double, 2>, 3> grad;  // P1 basis gradients
    double area;
};

TriGeometry tri_geometry(const Mesh& mesh, int t) {
    TriGeometry g;
    for (int k = 0; k < 3; ++k) g.v[k] = mesh.triangles(t, k);
    const double x0 = mesh.nodes(g.v[0], 0), y0 = mesh.nodes(g.v[0], 1);
    const double x1 = mesh.nodes(g.v[1], 0), y1 = mesh.nodes(g.v[1], 1);
    const double x2 = mesh.nodes(g.v[2], 0), y2 = mesh.nodes(g.v[2], 1);
    g.area = mesh.tri_area[t];
    const double inv2A = 1.0 / (2.0 * g.area);
    g.grad[0] = {(y1 - y2) * inv2A, (x2 - x1) * inv2A};
    g.grad[1] = {(y2 - y0) * inv2A, (x0 - x2) * inv2A};
    g.grad[2] = {(y0 - y1) * inv2A, (x1 - x0) * inv2A};
    return g;
}

struct QuadPoint {
    std::array<double, 3> bary;
    double weight;  // relative to |T|
};

// Exact rules per polynomial degree: centroid (1), edge midpoints (2),
// six-point rule (4).
std::vector<QuadPoint> quadrature_rule(int degree) {
    if (degree <= 1) return {{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.0}};
    if (degree <= 2)
        return {{{0.5, 0.5, 0.0}, 1.0 / 3},
                {{0.0, 0.5, 0.5}, 1.0 / 3},
                {{0.5, 0.0, 0.5}, 1.0 / 3}};
    if (degree <= 4) {
        const double a1 = 0.445948490915965, w1 = 0.223381589678011;
        const double a2 = 0.091576213509771, w2 = 0.109951743655322;
        return {{{1 - 2 * a1, a1, a1}, w1}, {{a1, 1 - 2 * a1, a1}, w1},
                {{a1, a1, 1 - 2 * a1}, w1}, {{1 - 2 * a2, a2, a2}, w2},
                {{a2, 1 - 2 * a2, a2}, w2}, {{a2, a2, 1 - 2 * a2}, w2}};
    }
    throw ValidationError("quadrature_rule: unsupported polynomial degree");
}

const double mass_local[3][3] = {
    {1.0 / 6, 1.0 / 12, 1.0 / 12},
    {1.0 / 12, 1.0 / 6, 1.0 / 12},
    {1.0 / 12, 1.0 / 12, 1.0 / 6},
};

Vec triangle_average(const Mesh& mesh, const Vec& nodal) {
    Vec avg(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t)
        avg[t] = (nodal[mesh.triangles(t, 0)] + nodal[mesh.triangles(t, 1)] +
                  nodal[mesh.triangles(t, 2)]) /
                 3.0;
    return avg;
}

// Per-triangle |strain| values from the velocity field.
Vec strain_magnitude(const Mesh& mesh, const Vec& u) {
    const int n = mesh.num_nodes();
    Vec mag(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const TriGeometry g = tri_geometry(mesh, t);
        double e11 = 0.0, e12 = 0.0, e22 = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double ux = u[g.v[k]];
            const double uy = u[n + g.v[k]];
            e11 += ux * g.grad[k][0];
            e12 += 0.5 * (ux * g.grad[k][1] + uy * g.grad[k][0]);
            e22 += uy * g.grad[k][1];
        }
        mag[t] = std::sqrt(e11 * e11 + 2.0 * e12 * e12 + e22 * e22);
    }
    return mag;
}

}  // namespace

void PhysicalParams::validate() const {
    if (!(mu0 > 0.0)) throw ValidationError("mu0 must be positive");
    if (!(mu(1.0) > 0.0) || !(mu(0.0) > 0.0))
        throw ValidationError("mu(theta) must stay positive for theta in [0,1]");
    if (g0 < 0.0) throw ValidationError("g0 must be nonnegative");
    if (g(1.0) < 0.0 || g(0.0) < 0.0)
        throw ValidationError("g(theta) must stay nonnegative for theta in [0,1]");
    if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
    if (!(Cp > 0.0)) throw ValidationError("Cp must be positive");
    if (alpha < 0.0) throw ValidationError("alpha must be nonnegative");
    if (beta < 0.0) throw ValidationError("beta must be nonnegative");
    if (!(rho > 0.0)) throw ValidationError("rho must be positive");
}

AssembledOperators assemble_constant_operators(const Mesh& mesh) {
    const int n = mesh.num_nodes();
    const int m = mesh.num_triangles();
    const int l = mesh.num_quads();

    AssembledOperators ops;
    std::vector<Triplet> tm, ta, tb;
    tm.reserve(9 * m);
    ta.reserve(9 * m);
    tb.reserve(6 * m);

    for (int t = 0; t < m; ++t) {
        const TriGeometry g = tri_geometry(mesh, t);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                tm.emplace_back(g.v[i], g.v[j], g.area * mass_local[i][j]);
                ta.emplace_back(g.v[i], g.v[j],
                                g.area * (g.grad[i][0] * g.grad[j][0] +
                                          g.grad[i][1] * g.grad[j][1]));
            }
            // -(p, div v) with constant pressure per quad
            tb.emplace_back(g.v[i], mesh.tri_quad[t], -g.area * g.grad[i][0]);
            tb.emplace_back(n + g.v[i], mesh.tri_quad[t], -g.area * g.grad[i][1]);
        }
    }

    ops.M_sca.resize(n, n);
    ops.M_sca.setFromTriplets(tm.begin(), tm.end());
    ops.A_sca.resize(n, n);
    ops.A_sca.setFromTriplets(ta.begin(), ta.end());
    ops.B.resize(2 * n, l);
    ops.B.setFromTriplets(tb.begin(), tb.end());

    const auto block_duplicate = [n](const SpMat& S) {
        std::vector<Triplet> trip;
        trip.reserve(2 * S.nonZeros());
        for (int r = 0; r < S.outerSize(); ++r)
            for (SpMat::InnerIterator it(S, r); it; ++it) {
                trip.emplace_back(r, static_cast<int>(it.col()), it.value());
                trip.emplace_back(n + r, n + static_cast<int>(it.col()), it.value());
            }
        SpMat out(2 * n, 2 * n);
        out.setFromTriplets(trip.begin(), trip.end());
        return out;
    };
    ops.M_vec = block_duplicate(ops.M_sca);
    ops.A_vec = block_duplicate(ops.A_sca);

    std::vector<Triplet> tg;
    for (const auto& e : mesh.boundary_edges_gamma) {
        const double len = (mesh.nodes.row(e[0]) - mesh.nodes.row(e[1])).norm();
        tg.emplace_back(e[0], e[0], len / 3.0);
        tg.emplace_back(e[1], e[1], len / 3.0);
        tg.emplace_back(e[0], e[1], len / 6.0);
        tg.emplace_back(e[1], e[0], len / 6.0);
    }
    ops.M_gamma.resize(n, n);
    ops.M_gamma.setFromTriplets(tg.begin(), tg.end());

    ops.E = strain_operator(mesh);
    ops.tri_weights = mesh.tri_area;
    ops.quad_areas = mesh.quad_areas();

    finalize(ops.M_sca);
    finalize(ops.A_sca);
    finalize(ops.M_vec);
    finalize(ops.A_vec);
    finalize(ops.M_gamma);
    finalize(ops.B);
    finalize(ops.E);
    return ops;
}

SpMat strain_operator(const Mesh& mesh) {
    const int n = mesh.num_nodes();
    const int m = mesh.num_triangles();
    std::vector<Triplet> trip;
    trip.reserve(18 * m);
    for (int t = 0; t < m; ++t) {
        const TriGeometry g = tri_geometry(mesh, t);
        for (int k = 0; k < 3; ++k) {
            const double gx = g.grad[k][0], gy = g.grad[k][1];
            trip.emplace_back(t, g.v[k], gx);                     // E11 = dx u1
            trip.emplace_back(m + t, g.v[k], 0.5 * gy);           // E12
            trip.emplace_back(m + t, n + g.v[k], 0.5 * gx);
            trip.emplace_back(2 * m + t, g.v[k], 0.5 * gy);       // E21 = E12
            trip.emplace_back(2 * m + t, n + g.v[k], 0.5 * gx);
            trip.emplace_back(3 * m + t, n + g.v[k], gy);         // E22 = dy u2
        }
    }
    SpMat E(4 * m, 2 * n);
    E.setFromTriplets(trip.begin(), trip.end());
    finalize(E);
    return E;
}

SpMat assemble_weighted_viscosity(const Mesh& mesh, const Vec& theta,
                                  const PhysicalParams& params) {
    const int n = mesh.num_nodes();
    const int m = mesh.num_triangles();
    const Vec avg = triangle_average(mesh, theta);

    std::vector<Triplet> trip;
    trip.reserve(36 * m);
    for (int t = 0; t < m; ++t) {
        const double mu_T = params.mu(avg[t]);
        if (!(mu_T > 0.0))
            throw NonPositiveViscosity("assemble_weighted_viscosity: mu_T <= 0 on triangle " +
                                       std::to_string(t));
        const TriGeometry g = tri_geometry(mesh, t);
        // local 4x6 strain block: rows (E11, E12, E21, E22), columns
        // (x-dofs of the 3 vertices, then y-dofs)
        double Bm[4][6] = {};
        for (int k = 0; k < 3; ++k) {
            const double gx = g.grad[k][0], gy = g.grad[k][1];
            Bm[0][k] = gx;
            Bm[1][k] = 0.5 * gy;
            Bm[1][3 + k] = 0.5 * gx;
            Bm[2][k] = 0.5 * gy;
            Bm[2][3 + k] = 0.5 * gx;
            Bm[3][3 + k] = gy;
        }
        const std::array<int, 6> dof = {g.v[0],     g.v[1],     g.v[2],
                                        n + g.v[0], n + g.v[1], n + g.v[2]};
        const double w = mu_T * g.area;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                double acc = 0.0;
                for (int c = 0; c < 4; ++c) acc += Bm[c][i] * Bm[c][j];
                if (acc != 0.0) trip.emplace_back(dof[i], dof[j], w * acc);
            }
    }
    SpMat A(2 * n, 2 * n);
    A.setFromTriplets(trip.begin(), trip.end());
    finalize(A);
    return A;
}

SpMat assemble_multiplier_coupling(const Mesh& mesh, const Vec& theta,
                                   const PhysicalParams& params) {
    const int n = mesh.num_nodes();
    const int m = mesh.num_triangles();
    const Vec avg = triangle_average(mesh, theta);

    std::vector<Triplet> trip;
    trip.reserve(18 * m);
    for (int t = 0; t < m; ++t) {
        const double g_T = params.g(avg[t]);
        if (g_T < 0.0)
            throw NegativeYield("assemble_multiplier_coupling: g_T < 0 on triangle " +
                                std::to_string(t));
        const TriGeometry g = tri_geometry(mesh, t);
        const double w = g_T * g.area;
        for (int k = 0; k < 3; ++k) {
            const double gx = g.grad[k][0], gy = g.grad[k][1];
            trip.emplace_back(g.v[k], t, w * gx);
            trip.emplace_back(g.v[k], m + t, w * 0.5 * gy);
            trip.emplace_back(n + g.v[k], m + t, w * 0.5 * gx);
            trip.emplace_back(g.v[k], 2 * m + t, w * 0.5 * gy);
            trip.emplace_back(n + g.v[k], 2 * m + t, w * 0.5 * gx);
            trip.emplace_back(n + g.v[k], 3 * m + t, w * gy);
        }
    }
    SpMat Q(2 * n, 4 * m);
    Q.setFromTriplets(trip.begin(), trip.end());
    finalize(Q);
    return Q;
}

namespace {

// C_loc[a][b] = (|T|/6) * sum over the two edges at a of w(midpoint).grad_b,
// which is the 3-point edge-midpoint rule applied to phi_a (w . grad phi_b).
void convection_local(const Mesh& mesh, const Vec& w, int n, int t,
                      const TriGeometry& g, double C_loc[3][3]) {
    std::array<std::array<double, 2>, 3> wv;
    for (int k = 0; k < 3; ++k) wv[k] = {w[g.v[k]], w[n + g.v[k]]};
    // midpoint values on edges (0,1), (1,2), (2,0)
    std::array<std::array<double, 2>, 3> wm;
    for (int e = 0; e < 3; ++e) {
        const int i = e, j = (e + 1) % 3;
        wm[e] = {0.5 * (wv[i][0] + wv[j][0]), 0.5 * (wv[i][1] + wv[j][1])};
    }
    for (int a = 0; a < 3; ++a) {
        // edges containing vertex a: (a, a+1) and (a+2, a)
        const int e1 = a, e2 = (a + 2) % 3;
        for (int b = 0; b < 3; ++b) {
            const double conv1 = wm[e1][0] * g.grad[b][0] + wm[e1][1] * g.grad[b][1];
            const double conv2 = wm[e2][0] * g.grad[b][0] + wm[e2][1] * g.grad[b][1];
            C_loc[a][b] = (g.area / 6.0) * (conv1 + conv2);
        }
    }
}

}  // namespace

SpMat assemble_convection_scalar(const Mesh& mesh, const Vec& w) {
    const int n = mesh.num_nodes();
    std::vector<Triplet> trip;
    trip.reserve(9 * mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const TriGeometry g = tri_geometry(mesh, t);
        double C_loc[3][3];
        convection_local(mesh, w, n, t, g, C_loc);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                if (C_loc[a][b] != 0.0) trip.emplace_back(g.v[a], g.v[b], C_loc[a][b]);
    }
    SpMat C(n, n);
    C.setFromTriplets(trip.begin(), trip.end());
    finalize(C);
    return C;
}

SpMat assemble_convection_vector(const Mesh& mesh, const Vec& w) {
    const int n = mesh.num_nodes();
    const SpMat Cs = assemble_convection_scalar(mesh, w);
    std::vector<Triplet> trip;
    trip.reserve(2 * Cs.nonZeros());
    for (int r = 0; r < Cs.outerSize(); ++r)
        for (SpMat::InnerIterator it(Cs, r); it; ++it) {
            trip.emplace_back(r, static_cast<int>(it.col()), it.value());
            trip.emplace_back(n + r, n + static_cast<int>(it.col()), it.value());
        }
    SpMat C(2 * n, 2 * n);
    C.setFromTriplets(trip.begin(), trip.end());
    finalize(C);
    return C;
}

DissipationOperators assemble_dissipation(const Mesh& mesh, const Vec& u,
                                          const PhysicalParams& params) {
    (void)params;  // the weights depend on the strain only
    const int n = mesh.num_nodes();
    const int m = mesh.num_triangles();
    const Vec mag = strain_magnitude(mesh, u);

    DissipationOperators out;
    std::vector<Triplet> t1, t2;
    t1.reserve(9 * m);
    t2.reserve(9 * m);
    out.Th1 = Vec::Zero(n);
    out.Th2 = Vec::Zero(n);
    for (int t = 0; t < m; ++t) {
        const TriGeometry g = tri_geometry(mesh, t);
        const double w1 = mag[t];
        const double w2 = mag[t] * mag[t];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double mij = g.area * mass_local[i][j];
                if (w1 != 0.0) t1.emplace_back(g.v[i], g.v[j], w1 * mij);
                if (w2 != 0.0) t2.emplace_back(g.v[i], g.v[j], w2 * mij);
            }
            out.Th1[g.v[i]] += g.area / 6.0 * w1;
            out.Th2[g.v[i]] += g.area / 6.0 * w2;
        }
    }
    out.M1.resize(n, n);
    out.M1.setFromTriplets(t1.begin(), t1.end());
    out.M2.resize(n, n);
    out.M2.setFromTriplets(t2.begin(), t2.end());
    finalize(out.M1);
    finalize(out.M2);
    return out;
}

Vec scalar_load_vector(const Mesh& mesh,
                       const std::function<double(double, double)>& s, int degree) {
    const auto rule = quadrature_rule(degree);
    Vec load = Vec::Zero(mesh.num_nodes());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const TriGeometry g = tri_geometry(mesh, t);
        for (const auto& qp : rule) {
            double x = 0.0, y = 0.0;
            for (int k = 0; k < 3; ++k) {
                x += qp.bary[k] * mesh.nodes(g.v[k], 0);
                y += qp.bary[k] * mesh.nodes(g.v[k], 1);
            }
            const double sval = s(x, y);
            for (int k = 0; k < 3; ++k)
                load[g.v[k]] += g.area * qp.weight * qp.bary[k] * sval;
        }
    }
    return load;
}

Vec vector_load_vector(const Mesh& mesh,
                       const std::function<std::array<double, 2>(double, double)>& f,
                       int degree) {
    const int n = mesh.num_nodes();
    const auto rule = quadrature_rule(degree);
    Vec load = Vec::Zero(2 * n);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const TriGeometry g = tri_geometry(mesh, t);
        for (const auto& qp : rule) {
            double x = 0.0, y = 0.0;
            for (int k = 0; k < 3; ++k) {
                x += qp.bary[k] * mesh.nodes(g.v[k], 0);
                y += qp.bary[k] * mesh.nodes(g.v[k], 1);
            }
            const auto fval = f(x, y);
            for (int k = 0; k < 3; ++k) {
                load[g.v[k]] += g.area * qp.weight * qp.bary[k] * fval[0];
                load[n + g.v[k]] += g.area * qp.weight * qp.bary[k] * fval[1];
            }
        }
    }
    return load;
}

Vec body_force_vector(const Mesh& mesh, double t) {
    (void)t;  // the experiments use a time-constant force
    return vector_load_vector(
        mesh,
        [](double x1, double x2) {
            return std::array<double, 2>{300.0 * (x2 - 0.5), 300.0 * (0.5 - x1)};
        },
        2);
}

std::array<std::array<double, 2>, 3> p1_gradients(const Mesh& mesh, int t) {
    return tri_geometry(mesh, t).grad;
}

DirichletBc no_slip_everywhere(const Mesh& mesh) {
    const int n = mesh.num_nodes();
    DirichletBc bc;
    for (int node : mesh.all_boundary_nodes()) {
        bc.dofs.push_back(node);
        bc.dofs.push_back(n + node);
    }
    bc.values = Vec::Zero(static_cast<int>(bc.dofs.size()));
    return bc;
}

namespace {

std::vector<char> dof_mask(int dim, const DirichletBc& bc) {
    std::vector<char> mask(dim, 0);
    for (int dof : bc.dofs) mask[dof] = 1;
    return mask;
}

}  // namespace

void apply_dirichlet(SpMat& A, const DirichletBc& bc) {
    const auto mask = dof_mask(static_cast<int>(A.rows()), bc);
    std::vector<Triplet> trip;
    trip.reserve(A.nonZeros() + bc.dofs.size());
    for (int r = 0; r < A.outerSize(); ++r)
        for (SpMat::InnerIterator it(A, r); it; ++it) {
            const int c = static_cast<int>(it.col());
            if (mask[r] || mask[c]) continue;
            trip.emplace_back(r, c, it.value());
        }
    for (int dof : bc.dofs) trip.emplace_back(dof, dof, 1.0);
    SpMat out(A.rows(), A.cols());
    out.setFromTriplets(trip.begin(), trip.end());
    finalize(out);
    A = std::move(out);
}

void zero_rows(SpMat& A, const DirichletBc& bc) {
    const auto mask = dof_mask(static_cast<int>(A.rows()), bc);
    std::vector<Triplet> trip;
    trip.reserve(A.nonZeros());
    for (int r = 0; r < A.outerSize(); ++r) {
        if (mask[r]) continue;
        for (SpMat::InnerIterator it(A, r); it; ++it)
            trip.emplace_back(r, static_cast<int>(it.col()), it.value());
    }
    SpMat out(A.rows(), A.cols());
    out.setFromTriplets(trip.begin(), trip.end());
    finalize(out);
    A = std::move(out);
}

void zero_cols(SpMat& A, const DirichletBc& bc) {
    const auto mask = dof_mask(static_cast<int>(A.cols()), bc);
    std::vector<Triplet> trip;
    trip.reserve(A.nonZeros());
    for (int r = 0; r < A.outerSize(); ++r)
        for (SpMat::InnerIterator it(A, r); it; ++it) {
            const int c = static_cast<int>(it.col());
            if (mask[c]) continue;
            trip.emplace_back(r, c, it.value());
        }
    SpMat out(A.rows(), A.cols());
    out.setFromTriplets(trip.begin(), trip.end());
    finalize(out);
    A = std::move(out);
}

void apply_dirichlet_rhs(Vec& rhs, const DirichletBc& bc) {
    for (int k = 0; k < bc.size(); ++k) rhs[bc.dofs[k]] = bc.values[k];
}

}  // namespace bingham
