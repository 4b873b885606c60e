#include <doctest.h>

#include <cmath>
#include <random>

#include "nsadr/fem.hpp"
#include "nsadr/mesh.hpp"
#include "nsadr/mms.hpp"

using namespace nsadr;

TEST_CASE("manufactured solution structure") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(0.0, 1.0);

    for (int i = 0; i < 1000; ++i) {
        const double x = dist(rng), y = dist(rng), t = dist(rng);
        // divergence-free
        const Eigen::Matrix2d g = mms::velocity_gradient(x, y, t);
        CHECK(std::abs(g(0, 0) + g(1, 1)) <= 1e-12);
    }

    // no-slip / zero boundary values
    for (int i = 0; i < 50; ++i) {
        const double s = dist(rng), t = dist(rng);
        CHECK(mms::velocity(0.0, s, t).norm() == 0.0);
        CHECK(mms::velocity(1.0, s, t).norm() == 0.0);
        CHECK(mms::velocity(s, 0.0, t).norm() == 0.0);
        CHECK(mms::velocity(s, 1.0, t).norm() == 0.0);
        CHECK(mms::concentration(0.0, s, t) == 0.0);
        CHECK(mms::concentration(s, 1.0, t) == 0.0);
    }

    // the (2y-1), (2x-1) factors vanish at the centre
    CHECK(mms::velocity(0.5, 0.5, 0.3).norm() == 0.0);

    // zero-mean pressure: p is quadratic, integrate exactly by quadrature
    const auto mesh = build_unit_square_mesh(4);
    const QuadratureRule& quad = default_quadrature();
    for (double t : {0.0, 0.5, 1.0}) {
        double integral = 0.0;
        for (int k = 0; k < mesh.n_triangles(); ++k) {
            const auto geo = element_geometry(mesh, k);
            for (int q = 0; q < quad.size(); ++q) {
                const auto N = ReferenceElement::shape(quad.points(q, 0),
                                                       quad.points(q, 1));
                const Eigen::Vector2d xq = geo.coords.transpose() * N;
                integral += quad.weights(q) * 2.0 * geo.area *
                            mms::pressure(xq(0), xq(1), t);
            }
        }
        CHECK(std::abs(integral) <= 1e-14);
    }
}

TEST_CASE("hand-coded derivatives match finite differences") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> dist(0.05, 0.95);
    const double eps = 1e-6;

    for (int i = 0; i < 200; ++i) {
        const double x = dist(rng), y = dist(rng), t = dist(rng);

        const Eigen::Matrix2d g = mms::velocity_gradient(x, y, t);
        const Eigen::Vector2d fx =
            (mms::velocity(x + eps, y, t) - mms::velocity(x - eps, y, t)) /
            (2 * eps);
        const Eigen::Vector2d fy =
            (mms::velocity(x, y + eps, t) - mms::velocity(x, y - eps, t)) /
            (2 * eps);
        CHECK(g(0, 0) == doctest::Approx(fx(0)).epsilon(1e-7));
        CHECK(g(1, 0) == doctest::Approx(fx(1)).epsilon(1e-7));
        CHECK(g(0, 1) == doctest::Approx(fy(0)).epsilon(1e-7));
        CHECK(g(1, 1) == doctest::Approx(fy(1)).epsilon(1e-7));

        const Eigen::Vector2d gc = mms::concentration_gradient(x, y, t);
        CHECK(gc(0) == doctest::Approx((mms::concentration(x + eps, y, t) -
                                        mms::concentration(x - eps, y, t)) /
                                       (2 * eps))
                           .epsilon(1e-7));
        CHECK(gc(1) == doctest::Approx((mms::concentration(x, y + eps, t) -
                                        mms::concentration(x, y - eps, t)) /
                                       (2 * eps))
                           .epsilon(1e-7));
    }
}

TEST_CASE("forcing terms match the finite-difference strong form") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(0.05, 0.95);
    const double eps = 1e-5;

    for (const char* key : {"I-a", "I-b", "I-c", "II-a", "II-b"}) {
        const CaseSetup cs = make_case(key);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double x = dist(rng), y = dist(rng), t = dist(rng);

            const Eigen::Vector2d ut =
                (mms::velocity(x, y, t + eps) - mms::velocity(x, y, t - eps)) /
                (2 * eps);
            const Eigen::Vector2d ux =
                (mms::velocity(x + eps, y, t) - mms::velocity(x - eps, y, t)) /
                (2 * eps);
            const Eigen::Vector2d uy =
                (mms::velocity(x, y + eps, t) - mms::velocity(x, y - eps, t)) /
                (2 * eps);
            const Eigen::Vector2d lap =
                (mms::velocity(x + eps, y, t) - 2 * mms::velocity(x, y, t) +
                 mms::velocity(x - eps, y, t)) /
                    (eps * eps) +
                (mms::velocity(x, y + eps, t) - 2 * mms::velocity(x, y, t) +
                 mms::velocity(x, y - eps, t)) /
                    (eps * eps);
            const Eigen::Vector2d u = mms::velocity(x, y, t);
            const Eigen::Vector2d gp(
                (mms::pressure(x + eps, y, t) - mms::pressure(x - eps, y, t)) /
                    (2 * eps),
                (mms::pressure(x, y + eps, t) - mms::pressure(x, y - eps, t)) /
                    (2 * eps));
            const double mu = cs.viscosity(mms::concentration(x, y, t));
            const Eigen::Vector2d f_fd = cs.params.rho * ut +
                                         cs.params.rho * (u(0) * ux + u(1) * uy) -
                                         mu * lap + gp;
            worst = std::max(worst, (mms::forcing_f(x, y, t, cs) - f_fd)
                                        .lpNorm<Eigen::Infinity>());

            const double ct = (mms::concentration(x, y, t + eps) -
                               mms::concentration(x, y, t - eps)) /
                              (2 * eps);
            const double cx = (mms::concentration(x + eps, y, t) -
                               mms::concentration(x - eps, y, t)) /
                              (2 * eps);
            const double cy = (mms::concentration(x, y + eps, t) -
                               mms::concentration(x, y - eps, t)) /
                              (2 * eps);
            const double cxx = (mms::concentration(x + eps, y, t) -
                                2 * mms::concentration(x, y, t) +
                                mms::concentration(x - eps, y, t)) /
                               (eps * eps);
            const double cyy = (mms::concentration(x, y + eps, t) -
                                2 * mms::concentration(x, y, t) +
                                mms::concentration(x, y - eps, t)) /
                               (eps * eps);
            const auto [D1, D2] = cs.diffusion(x, y, t);
            const double D1x =
                (cs.diffusion(x + eps, y, t).first - cs.diffusion(x - eps, y, t).first) /
                (2 * eps);
            const double D2y = (cs.diffusion(x, y + eps, t).second -
                                cs.diffusion(x, y - eps, t).second) /
                               (2 * eps);
            const double g_fd = ct - (D1 * cxx + D1x * cx + D2 * cyy + D2y * cy) +
                                u.dot(Eigen::Vector2d(cx, cy)) +
                                cs.params.alpha * mms::concentration(x, y, t);
            worst = std::max(worst, std::abs(mms::forcing_g(x, y, t, cs) - g_fd));
        }
        CHECK(worst <= 1e-6);
    }
}
