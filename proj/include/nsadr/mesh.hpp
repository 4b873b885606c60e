// ============================================================================
// mesh.hpp — uniform structured triangulation of the unit square
// ============================================================================
#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <vector>

namespace nsadr {

// Uniform right-triangle mesh of (0,1)x(0,1). Each grid cell is split along
// the lower-left -> upper-right diagonal into two counterclockwise triangles.
// Nodes are numbered lexicographically by (y, x): id = j*(n_div+1) + i.
struct StructuredTriMesh {
    int n_div = 0;
    Eigen::Matrix<double, Eigen::Dynamic, 2> nodes;    // (n_div+1)^2 rows
    Eigen::Matrix<int, Eigen::Dynamic, 3> triangles;   // 2*n_div^2 rows
    std::vector<int> boundary_nodes;                   // sorted, 4*n_div entries
    std::vector<char> is_boundary;                     // per-node mask
    double h = 0.0;                                    // longest edge = sqrt(2)/n_div

    int n_nodes() const { return static_cast<int>(nodes.rows()); }
    int n_triangles() const { return static_cast<int>(triangles.rows()); }
    int node_id(int i, int j) const { return j * (n_div + 1) + i; }
};

// Affine geometry of one element. The Jacobian maps the reference triangle
// {(xi,eta): xi,eta >= 0, xi+eta <= 1} onto the physical element.
struct ElementGeometry {
    Eigen::Matrix<double, 3, 2> coords;  // row a = vertex a
    Eigen::Matrix2d jacobian;
    double area = 0.0;
    double h_k = 0.0;  // longest edge
};

StructuredTriMesh build_unit_square_mesh(int n_div);

ElementGeometry element_geometry(const StructuredTriMesh& mesh, int k);

// Plain-text dump for debugging: one "x y" line per node, then one
// "i j k" line per triangle.
void dump_mesh(const StructuredTriMesh& mesh, std::ostream& out);

}  // namespace nsadr
