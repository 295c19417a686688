#include "binghamflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "binghamflow/errors.hpp"

namespace bingham {

namespace {

double signed_area(const Eigen::Matrix<double, Eigen::Dynamic, 2>& nodes, int a,
                   int b, int c) {
    const double abx = nodes(b, 0) - nodes(a, 0);
    const double aby = nodes(b, 1) - nodes(a, 1);
    const double acx = nodes(c, 0) - nodes(a, 0);
    const double acy = nodes(c, 1) - nodes(a, 1);
    return 0.5 * (abx * acy - aby * acx);
}

}  // namespace

std::vector<int> Mesh::all_boundary_nodes() const {
    std::vector<int> out = boundary_nodes_gamma;
    out.insert(out.end(), boundary_nodes_gamma0.begin(), boundary_nodes_gamma0.end());
    std::sort(out.begin(), out.end());
    return out;
}

Eigen::VectorXd Mesh::quad_areas() const {
    Eigen::VectorXd areas(num_quads());
    for (int q = 0; q < num_quads(); ++q) areas[q] = 0.0;
    for (int t = 0; t < num_triangles(); ++t) areas[tri_quad[t]] += tri_area[t];
    return areas;
}

Mesh build_cross_grid(int nx, int ny, double x_extent, double y_extent) {
    if (nx < 1 || ny < 1)
        throw ValidationError("build_cross_grid: quad counts must be >= 1");
    if (!(x_extent > 0.0) || !(y_extent > 0.0))
        throw ValidationError("build_cross_grid: extents must be positive");

    Mesh mesh;
    mesh.nx = nx;
    mesh.ny = ny;
    mesh.x_extent = x_extent;
    mesh.y_extent = y_extent;

    const int n_vertices = (nx + 1) * (ny + 1);
    const int n = n_vertices + nx * ny;
    const int m = 4 * nx * ny;
    const double hx = x_extent / nx;
    const double hy = y_extent / ny;

    mesh.nodes.resize(n, 2);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const int v = mesh.vertex_index(i, j);
            mesh.nodes(v, 0) = i * hx;
            mesh.nodes(v, 1) = j * hy;
        }
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int c = mesh.center_index(i, j);
            mesh.nodes(c, 0) = (i + 0.5) * hx;
            mesh.nodes(c, 1) = (j + 0.5) * hy;
        }

    mesh.triangles.resize(m, 3);
    mesh.tri_area.resize(m);
    mesh.tri_quad.resize(m);
    mesh.quads.reserve(nx * ny);

    int t = 0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int bl = mesh.vertex_index(i, j);
            const int br = mesh.vertex_index(i + 1, j);
            const int tr = mesh.vertex_index(i + 1, j + 1);
            const int tl = mesh.vertex_index(i, j + 1);
            const int c = mesh.center_index(i, j);
            const int quad = j * nx + i;
            mesh.quads.push_back(Quad{c, {bl, br, tr, tl}});

            const std::array<std::array<int, 3>, 4> tris = {{
                {bl, br, c},  // bottom
                {br, tr, c},  // right
                {tr, tl, c},  // top
                {tl, bl, c},  // left
            }};
            for (const auto& tri : tris) {
                mesh.triangles(t, 0) = tri[0];
                mesh.triangles(t, 1) = tri[1];
                mesh.triangles(t, 2) = tri[2];
                const double area = signed_area(mesh.nodes, tri[0], tri[1], tri[2]);
                mesh.tri_area[t] = area;
                mesh.tri_quad[t] = quad;
                ++t;
            }
        }

    for (int i = 0; i <= nx; ++i)
        mesh.boundary_nodes_gamma.push_back(mesh.vertex_index(i, ny));
    for (int i = 0; i <= nx; ++i)
        mesh.boundary_nodes_gamma0.push_back(mesh.vertex_index(i, 0));
    for (int j = 1; j < ny; ++j) {
        mesh.boundary_nodes_gamma0.push_back(mesh.vertex_index(0, j));
        mesh.boundary_nodes_gamma0.push_back(mesh.vertex_index(nx, j));
    }
    std::sort(mesh.boundary_nodes_gamma0.begin(), mesh.boundary_nodes_gamma0.end());
    for (int i = 0; i < nx; ++i)
        mesh.boundary_edges_gamma.push_back(
            {mesh.vertex_index(i, ny), mesh.vertex_index(i + 1, ny)});

    mesh.h = inradius(mesh);
    return mesh;
}

double inradius(const Mesh& mesh) {
    const int a = mesh.triangles(0, 0);
    const int b = mesh.triangles(0, 1);
    const int c = mesh.triangles(0, 2);
    const auto side = [&](int p, int r) {
        return (mesh.nodes.row(p) - mesh.nodes.row(r)).norm();
    };
    const double semiperimeter = 0.5 * (side(a, b) + side(b, c) + side(c, a));
    return mesh.tri_area[0] / semiperimeter;
}

void dump_text(const Mesh& mesh, std::ostream& os) {
    os << "nodes " << mesh.num_nodes() << "\n";
    for (int i = 0; i < mesh.num_nodes(); ++i)
        os << i << " " << mesh.nodes(i, 0) << " " << mesh.nodes(i, 1) << "\n";
    os << "triangles " << mesh.num_triangles() << "\n";
    for (int t = 0; t < mesh.num_triangles(); ++t)
        os << t << " " << mesh.triangles(t, 0) << " " << mesh.triangles(t, 1) << " "
           << mesh.triangles(t, 2) << " quad " << mesh.tri_quad[t] << "\n";
}

}  // namespace bingham
