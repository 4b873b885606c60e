#include <doctest.h>

#include <cmath>
#include <random>

#include "nsadr/fem.hpp"
#include "nsadr/mesh.hpp"

using namespace nsadr;

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// closed-form moment on the reference triangle: int xi^p eta^q = p! q! / (p+q+2)!
double moment(int p, int q) {
    return factorial(p) * factorial(q) / factorial(p + q + 2);
}

}  // namespace

TEST_CASE("partition of unity and Kronecker property") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        double xi = dist(rng), eta = dist(rng);
        if (xi + eta > 1.0) {  // fold into the reference triangle
            xi = 1.0 - xi;
            eta = 1.0 - eta;
        }
        CHECK(ReferenceElement::shape(xi, eta).sum() == doctest::Approx(1.0));
    }
    CHECK(ReferenceElement::shape(0, 0)(0) == 1.0);
    CHECK(ReferenceElement::shape(1, 0)(1) == 1.0);
    CHECK(ReferenceElement::shape(0, 1)(2) == 1.0);
}

TEST_CASE("quadrature rules: weights, sums, and exactness") {
    CHECK(quadrature(1).size() == 1);
    CHECK(quadrature(1).weights(0) == doctest::Approx(0.5));
    CHECK(quadrature(2).size() == 3);

    for (int degree = 1; degree <= 4; ++degree) {
        const QuadratureRule rule = quadrature(degree);
        CHECK(rule.exactness_degree >= degree);
        CHECK((rule.weights.array() > 0.0).all());
        CHECK(rule.weights.sum() == doctest::Approx(0.5));

        for (int p = 0; p <= rule.exactness_degree; ++p)
            for (int q = 0; p + q <= rule.exactness_degree; ++q) {
                double s = 0.0;
                for (int k = 0; k < rule.size(); ++k)
                    s += rule.weights(k) * std::pow(rule.points(k, 0), p) *
                         std::pow(rule.points(k, 1), q);
                CHECK(s == doctest::Approx(moment(p, q)).epsilon(1e-12));
            }
    }
    CHECK_THROWS_AS(quadrature(0), std::invalid_argument);
    CHECK_THROWS_AS(quadrature(5), std::invalid_argument);
}

TEST_CASE("int xi*eta over the reference triangle is 1/24") {
    const QuadratureRule rule = quadrature(2);
    double s = 0.0;
    for (int k = 0; k < rule.size(); ++k)
        s += rule.weights(k) * rule.points(k, 0) * rule.points(k, 1);
    CHECK(s == doctest::Approx(1.0 / 24.0).epsilon(1e-13));
}

TEST_CASE("physical gradients") {
    // identity map reproduces the reference gradients
    const auto ref = ReferenceElement::reference_gradients();
    const auto g_id = physical_gradients(Eigen::Matrix2d::Identity());
    CHECK((g_id - ref).norm() == doctest::Approx(0.0));

    // gradients on a right triangle with legs 1/n have entries in {-n, 0, n}
    const int n = 5;
    Eigen::Matrix2d jac;
    jac << 1.0 / n, 0.0, 0.0, 1.0 / n;
    const auto g = physical_gradients(jac);
    CHECK(g(0, 0) == doctest::Approx(-n));
    CHECK(g(0, 1) == doctest::Approx(-n));
    CHECK(g(1, 0) == doctest::Approx(n));
    CHECK(g(1, 1) == doctest::Approx(0.0));
    CHECK(g(2, 0) == doctest::Approx(0.0));
    CHECK(g(2, 1) == doctest::Approx(n));

    // sum of gradients vanishes on any element
    const auto mesh = build_unit_square_mesh(3);
    for (int k = 0; k < mesh.n_triangles(); ++k) {
        const auto geo = element_geometry(mesh, k);
        const auto gp = physical_gradients(geo.jacobian);
        CHECK(gp.colwise().sum().norm() == doctest::Approx(0.0));
    }

    Eigen::Matrix2d singular;
    singular << 1.0, 2.0, 0.5, 1.0;
    CHECK_THROWS_AS(physical_gradients(singular), std::invalid_argument);
}

TEST_CASE("interpolation orders for sin(pi x) sin(pi y)") {
    const QuadratureRule& quad = default_quadrature();
    auto v = [](double x, double y) {
        return std::sin(M_PI * x) * std::sin(M_PI * y);
    };
    auto gv = [](double x, double y) {
        return Eigen::Vector2d(M_PI * std::cos(M_PI * x) * std::sin(M_PI * y),
                               M_PI * std::sin(M_PI * x) * std::cos(M_PI * y));
    };

    double l2[3], h1[3];
    const int grids[3] = {10, 20, 40};
    for (int g = 0; g < 3; ++g) {
        const auto mesh = build_unit_square_mesh(grids[g]);
        Eigen::VectorXd nodal(mesh.n_nodes());
        for (int i = 0; i < mesh.n_nodes(); ++i)
            nodal(i) = v(mesh.nodes(i, 0), mesh.nodes(i, 1));

        double e2 = 0.0, eh = 0.0;
        for (int k = 0; k < mesh.n_triangles(); ++k) {
            const auto geo = element_geometry(mesh, k);
            const auto G = physical_gradients(geo.jacobian);
            Eigen::Vector2d gh(0, 0);
            for (int a = 0; a < 3; ++a)
                gh += nodal(mesh.triangles(k, a)) * G.row(a).transpose();
            for (int q = 0; q < quad.size(); ++q) {
                const auto N = ReferenceElement::shape(quad.points(q, 0),
                                                       quad.points(q, 1));
                const double w = quad.weights(q) * 2.0 * geo.area;
                const Eigen::Vector2d xq = geo.coords.transpose() * N;
                double vh = 0.0;
                for (int a = 0; a < 3; ++a)
                    vh += N(a) * nodal(mesh.triangles(k, a));
                const double e = v(xq(0), xq(1)) - vh;
                e2 += w * e * e;
                eh += w * (e * e + (gv(xq(0), xq(1)) - gh).squaredNorm());
            }
        }
        l2[g] = std::sqrt(e2);
        h1[g] = std::sqrt(eh);
    }

    for (int g = 0; g < 2; ++g) {
        CHECK(std::log2(l2[g] / l2[g + 1]) == doctest::Approx(2.0).epsilon(0.05));
        CHECK(std::log2(h1[g] / h1[g + 1]) == doctest::Approx(1.0).epsilon(0.1));
    }
}
