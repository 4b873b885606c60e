// ============================================================================
// mms.hpp — manufactured exact solution, derivatives, and forcing terms
// ============================================================================
#pragma once

#include <Eigen/Core>

#include "nsadr/models.hpp"

namespace nsadr::mms {

// Closed-form fields used by all convergence studies:
//   u = e^{-t} ( x^2(x-1)^2 y(y-1)(2y-1),  -x(x-1)(2x-1) y^2(y-1)^2 )
//   p = e^{-t} (3x^2 + 3y^2 - 2)
//   c = e^{-t} x y (x-1)(y-1)
// u is divergence-free, u and c vanish on the boundary, p has zero mean.

Eigen::Vector2d velocity(double x, double y, double t);
Eigen::Vector2d velocity_dt(double x, double y, double t);
// row i = gradient of u_i
Eigen::Matrix2d velocity_gradient(double x, double y, double t);
Eigen::Vector2d velocity_laplacian(double x, double y, double t);

double pressure(double x, double y, double t);
Eigen::Vector2d pressure_gradient(double x, double y, double t);

double concentration(double x, double y, double t);
double concentration_dt(double x, double y, double t);
Eigen::Vector2d concentration_gradient(double x, double y, double t);
double concentration_xx(double x, double y, double t);
double concentration_yy(double x, double y, double t);

// Strong-form residual forcings: plugging the exact solution into the
// momentum and transport equations with the given case's coefficients.
Eigen::Vector2d forcing_f(double x, double y, double t, const CaseSetup& cs);
double forcing_g(double x, double y, double t, const CaseSetup& cs);

}  // namespace nsadr::mms
