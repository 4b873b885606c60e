// ============================================================================
// fem.hpp — P1 reference element and triangle quadrature
// ============================================================================
#pragma once

#include <Eigen/Core>

namespace nsadr {

// Linear basis on the reference triangle:
//   N1 = 1 - xi - eta,  N2 = xi,  N3 = eta.
struct ReferenceElement {
    static Eigen::Vector3d shape(double xi, double eta) {
        return {1.0 - xi - eta, xi, eta};
    }
    static Eigen::Matrix<double, 3, 2> reference_gradients() {
        Eigen::Matrix<double, 3, 2> g;
        g << -1.0, -1.0,
              1.0,  0.0,
              0.0,  1.0;
        return g;
    }
};

// Symmetric Gauss rule on the reference triangle; weights are positive and
// sum to the reference area 1/2.
struct QuadratureRule {
    Eigen::Matrix<double, Eigen::Dynamic, 2> points;  // (xi, eta)
    Eigen::VectorXd weights;
    int exactness_degree = 0;

    int size() const { return static_cast<int>(weights.size()); }
};

// Rules for degree in {1,2,3,4}.
QuadratureRule quadrature(int degree);

// Degree-4 rule used throughout assembly and error integration. Variable
// coefficients make the integrands non-polynomial; degree 4 keeps the
// skew-symmetry identity of the convective form exact for P1 fields.
const QuadratureRule& default_quadrature();

// Gradients of the affine-mapped P1 basis; constant on each element.
Eigen::Matrix<double, 3, 2> physical_gradients(const Eigen::Matrix2d& jacobian);

}  // namespace nsadr
