#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace bingham {

struct Quad {
    int center;                  // quad-center node index
    std::array<int, 4> corners;  // BL, BR, TR, TL (counterclockwise)
};

// Crossed-triangle macroelement mesh of an axis-aligned rectangle.
//
// The rectangle is divided into nx*ny congruent quads; each quad is split by
// its two diagonals into four triangles that share the quad-center node.
// Velocity and temperature live at the n = (nx+1)(ny+1) + nx*ny P1 nodes,
// the pressure is constant per quad (l = nx*ny values), and the multiplier
// is constant per triangle with four components (4m values, m = 4*nx*ny).
//
// Node ordering: grid vertices first (row-major, bottom row first), then
// quad centers (row-major).  Triangle ordering: per quad in row-major quad
// order, four triangles each in the order bottom, right, top, left.
struct Mesh {
    int nx = 0, ny = 0;
    double x_extent = 1.0, y_extent = 1.0;

    Eigen::Matrix<double, Eigen::Dynamic, 2> nodes;   // n x 2
    Eigen::Matrix<int, Eigen::Dynamic, 3> triangles;  // m x 3, counterclockwise
    std::vector<Quad> quads;                          // l entries
    Eigen::VectorXd tri_area;                         // m
    std::vector<int> tri_quad;                        // owning quad per triangle

    // Gamma is the top edge (Robin boundary); Gamma0 the rest of the boundary.
    // The two top corners belong to Gamma only.
    std::vector<int> boundary_nodes_gamma;
    std::vector<int> boundary_nodes_gamma0;
    std::vector<std::array<int, 2>> boundary_edges_gamma;

    double h = 0.0;  // inradius of the (congruent) triangles

    int num_nodes() const { return static_cast<int>(nodes.rows()); }
    int num_triangles() const { return static_cast<int>(triangles.rows()); }
    int num_quads() const { return static_cast<int>(quads.size()); }

    int vertex_index(int i, int j) const { return j * (nx + 1) + i; }
    int center_index(int i, int j) const { return (nx + 1) * (ny + 1) + j * nx + i; }

    // Gamma and Gamma0 merged, sorted ascending.
    std::vector<int> all_boundary_nodes() const;

    Eigen::VectorXd quad_areas() const;
};

Mesh build_cross_grid(int nx, int ny, double x_extent = 1.0, double y_extent = 1.0);

// Inradius (area/semiperimeter) of triangle 0; equals mesh.h.
double inradius(const Mesh& mesh);

// Plain-text node/element listing, one node or triangle per line.
void dump_text(const Mesh& mesh, std::ostream& os);

}  // namespace bingham
