#include "nsadr/mms.hpp"

#include <cmath>

namespace nsadr::mms {

namespace {

// 1D factor polynomials and their derivatives.
//   P2(s) = s^2 (s-1)^2      P2'  = 2 P1      P2'' = 12s^2 - 12s + 2
//   P1(s) = s (s-1) (2s-1)   P1'  = 6s^2-6s+1 P1'' = 12s - 6
//   G(s)  = s (s-1)          G'   = 2s - 1    G''  = 2
inline double P2(double s) { return s * s * (s - 1.0) * (s - 1.0); }
inline double P1(double s) { return s * (s - 1.0) * (2.0 * s - 1.0); }
inline double dP1(double s) { return 6.0 * s * s - 6.0 * s + 1.0; }
inline double ddP1(double s) { return 12.0 * s - 6.0; }
inline double ddP2(double s) { return 12.0 * s * s - 12.0 * s + 2.0; }
inline double G(double s) { return s * (s - 1.0); }
inline double dG(double s) { return 2.0 * s - 1.0; }

}  // namespace

Eigen::Vector2d velocity(double x, double y, double t) {
    const double e = std::exp(-t);
    return {e * P2(x) * P1(y), -e * P1(x) * P2(y)};
}

Eigen::Vector2d velocity_dt(double x, double y, double t) {
    return -velocity(x, y, t);
}

Eigen::Matrix2d velocity_gradient(double x, double y, double t) {
    const double e = std::exp(-t);
    Eigen::Matrix2d g;
    // u1 = e P2(x) P1(y): du1/dx = 2 e P1(x) P1(y), du1/dy = e P2(x) P1'(y)
    g(0, 0) = 2.0 * e * P1(x) * P1(y);
    g(0, 1) = e * P2(x) * dP1(y);
    // u2 = -e P1(x) P2(y): du2/dx = -e P1'(x) P2(y), du2/dy = -2 e P1(x) P1(y)
    g(1, 0) = -e * dP1(x) * P2(y);
    g(1, 1) = -2.0 * e * P1(x) * P1(y);
    return g;
}

Eigen::Vector2d velocity_laplacian(double x, double y, double t) {
    const double e = std::exp(-t);
    return {e * (ddP2(x) * P1(y) + P2(x) * ddP1(y)),
            -e * (ddP1(x) * P2(y) + P1(x) * ddP2(y))};
}

double pressure(double x, double y, double t) {
    return std::exp(-t) * (3.0 * x * x + 3.0 * y * y - 2.0);
}

Eigen::Vector2d pressure_gradient(double x, double y, double t) {
    const double e = std::exp(-t);
    return {6.0 * e * x, 6.0 * e * y};
}

double concentration(double x, double y, double t) {
    return std::exp(-t) * G(x) * G(y);
}

double concentration_dt(double x, double y, double t) {
    return -concentration(x, y, t);
}

Eigen::Vector2d concentration_gradient(double x, double y, double t) {
    const double e = std::exp(-t);
    return {e * dG(x) * G(y), e * G(x) * dG(y)};
}

double concentration_xx(double x, double y, double t) {
    (void)x;
    return 2.0 * std::exp(-t) * G(y);
}

double concentration_yy(double x, double y, double t) {
    (void)y;
    return 2.0 * std::exp(-t) * G(x);
}

Eigen::Vector2d forcing_f(double x, double y, double t, const CaseSetup& cs) {
    const double rho = cs.params.rho;
    const Eigen::Vector2d u = velocity(x, y, t);
    const Eigen::Matrix2d gu = velocity_gradient(x, y, t);
    const Eigen::Vector2d lap = velocity_laplacian(x, y, t);
    const double mu = cs.viscosity(concentration(x, y, t));

    // f = rho u_t + rho (u . grad) u - mu(c) lap u + grad p
    return rho * velocity_dt(x, y, t) + rho * (gu * u) - mu * lap +
           pressure_gradient(x, y, t);
}

double forcing_g(double x, double y, double t, const CaseSetup& cs) {
    const Eigen::Vector2d u = velocity(x, y, t);
    const Eigen::Vector2d gc = concentration_gradient(x, y, t);
    const auto [d1, d2] = cs.diffusion(x, y, t);

    // div(D_i dc/dx_i e_i) = D1 c_xx + D1_x c_x + D2 c_yy + D2_y c_y
    const double diff = d1 * concentration_xx(x, y, t) +
                        cs.diffusion.d1_dx(x, y, t) * gc(0) +
                        d2 * concentration_yy(x, y, t) +
                        cs.diffusion.d2_dy(x, y, t) * gc(1);

    // g = c_t - div(D grad c) + u . grad c + alpha c
    return concentration_dt(x, y, t) - diff + u.dot(gc) +
           cs.params.alpha * concentration(x, y, t);
}

}  // namespace nsadr::mms
