#include "nsadr/fem.hpp"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>

namespace nsadr {

QuadratureRule quadrature(int degree) {
    QuadratureRule rule;
    switch (degree) {
        case 1: {
            // centroid rule
            rule.points.resize(1, 2);
            rule.points << 1.0 / 3.0, 1.0 / 3.0;
            rule.weights.resize(1);
            rule.weights << 0.5;
            rule.exactness_degree = 1;
            break;
        }
        case 2: {
            rule.points.resize(3, 2);
            rule.points << 1.0 / 6.0, 1.0 / 6.0,
                           2.0 / 3.0, 1.0 / 6.0,
                           1.0 / 6.0, 2.0 / 3.0;
            rule.weights = Eigen::VectorXd::Constant(3, 1.0 / 6.0);
            rule.exactness_degree = 2;
            break;
        }
        case 3: {
            // Strang 6-point rule, equal weights, all permutations of
            // barycentric (0.659..., 0.231..., 0.109...).
            const double a = 0.659027622374092;
            const double b = 0.231933368553031;
            const double c = 0.109039009072877;
            const double bary[6][3] = {{a, b, c}, {a, c, b}, {b, a, c},
                                       {b, c, a}, {c, a, b}, {c, b, a}};
            rule.points.resize(6, 2);
            for (int q = 0; q < 6; ++q)
                rule.points.row(q) << bary[q][1], bary[q][2];
            rule.weights = Eigen::VectorXd::Constant(6, 1.0 / 12.0);
            rule.exactness_degree = 3;
            break;
        }
        case 4: {
            // Dunavant 6-point rule, two symmetric orbits.
            const double a1 = 0.445948490915965, w1 = 0.223381589678011 / 2.0;
            const double a2 = 0.091576213509771, w2 = 0.109951743655322 / 2.0;
            rule.points.resize(6, 2);
            rule.points << a1, a1,
                           1.0 - 2.0 * a1, a1,
                           a1, 1.0 - 2.0 * a1,
                           a2, a2,
                           1.0 - 2.0 * a2, a2,
                           a2, 1.0 - 2.0 * a2;
            rule.weights.resize(6);
            rule.weights << w1, w1, w1, w2, w2, w2;
            rule.exactness_degree = 4;
            break;
        }
        default:
            throw std::invalid_argument("quadrature: unsupported degree (use 1..4)");
    }
    return rule;
}

const QuadratureRule& default_quadrature() {
    static const QuadratureRule rule = quadrature(4);
    return rule;
}

Eigen::Matrix<double, 3, 2> physical_gradients(const Eigen::Matrix2d& jacobian) {
    const double det = jacobian.determinant();
    if (std::abs(det) < 1e-14)
        throw std::invalid_argument("physical_gradients: singular Jacobian");
    // grad N = J^{-T} * grad_ref N
    return ReferenceElement::reference_gradients() * jacobian.inverse();
}

}  // namespace nsadr
