#include "nsadr/mesh.hpp"

#include <Eigen/LU>

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace nsadr {

StructuredTriMesh build_unit_square_mesh(int n_div) {
    if (n_div < 1)
        throw std::invalid_argument("build_unit_square_mesh: n_div must be >= 1");

    StructuredTriMesh mesh;
    mesh.n_div = n_div;
    const int np = n_div + 1;
    mesh.nodes.resize(np * np, 2);
    mesh.is_boundary.assign(np * np, 0);

    for (int j = 0; j < np; ++j) {
        for (int i = 0; i < np; ++i) {
            const int id = mesh.node_id(i, j);
            mesh.nodes(id, 0) = static_cast<double>(i) / n_div;
            mesh.nodes(id, 1) = static_cast<double>(j) / n_div;
            if (i == 0 || i == n_div || j == 0 || j == n_div) {
                mesh.is_boundary[id] = 1;
                mesh.boundary_nodes.push_back(id);
            }
        }
    }

    // Two CCW triangles per cell, cut along (i,j) -> (i+1,j+1).
    mesh.triangles.resize(2 * n_div * n_div, 3);
    int t = 0;
    for (int j = 0; j < n_div; ++j) {
        for (int i = 0; i < n_div; ++i) {
            const int a = mesh.node_id(i, j);
            const int b = mesh.node_id(i + 1, j);
            const int c = mesh.node_id(i + 1, j + 1);
            const int d = mesh.node_id(i, j + 1);
            mesh.triangles.row(t++) << a, b, c;
            mesh.triangles.row(t++) << a, c, d;
        }
    }

    mesh.h = std::sqrt(2.0) / n_div;
    return mesh;
}

ElementGeometry element_geometry(const StructuredTriMesh& mesh, int k) {
    if (k < 0 || k >= mesh.n_triangles())
        throw std::out_of_range("element_geometry: triangle index out of range");

    ElementGeometry geo;
    for (int a = 0; a < 3; ++a)
        geo.coords.row(a) = mesh.nodes.row(mesh.triangles(k, a));

    // Affine map x(xi) = x0 + J * (xi, eta)^T.
    geo.jacobian.col(0) = (geo.coords.row(1) - geo.coords.row(0)).transpose();
    geo.jacobian.col(1) = (geo.coords.row(2) - geo.coords.row(0)).transpose();
    geo.area = 0.5 * geo.jacobian.determinant();

    double h = 0.0;
    for (int a = 0; a < 3; ++a) {
        const Eigen::Vector2d e = geo.coords.row((a + 1) % 3) - geo.coords.row(a);
        h = std::max(h, e.norm());
    }
    geo.h_k = h;
    return geo;
}

void dump_mesh(const StructuredTriMesh& mesh, std::ostream& out) {
    for (int i = 0; i < mesh.n_nodes(); ++i)
        out << mesh.nodes(i, 0) << " " << mesh.nodes(i, 1) << "\n";
    for (int k = 0; k < mesh.n_triangles(); ++k)
        out << mesh.triangles(k, 0) << " " << mesh.triangles(k, 1) << " "
            << mesh.triangles(k, 2) << "\n";
}

}  // namespace nsadr
