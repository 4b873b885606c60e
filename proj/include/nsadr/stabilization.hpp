// ============================================================================
// stabilization.hpp — subgrid-scale parameters tau, tau', and subscale history
// ============================================================================
#pragma once

#include <Eigen/Core>

namespace nsadr {

enum class SubscaleMode { QuasiStatic, Dynamic };

struct StabConstants {
    double c1 = 4.0;
    double c2 = 2.0;
    double c3 = 1.0;
    SubscaleMode mode = SubscaleMode::Dynamic;
    // Uniform scaling of (tau1, tau2, tau3); 1 is the method, other values
    // exist for consistency checks (stabilization -> 0 recovers Galerkin).
    double tau_scale = 1.0;
    // Subscale time history: 1 restarts the subscale every step (one-term
    // history, the default), 0 keeps the full recurrence
    // u~^{n+1} = tau' R^{n+1} + (tau' M/dt) u~^n, whose fixed point is the
    // closed-form geometric limit.
    int truncation = 1;
};

struct TauTriple {
    double tau1 = 0.0;
    double tau2 = 0.0;
    double tau3 = 0.0;
};

// tau1 = (c1 mu_u / h^2 + c2 rho |u| / h)^{-1}
// tau2 = h^2 / (c1 tau1)
// tau3 = c3 (9 D / (4 h^2) + 3 |u| / (2 h) + alpha)^{-1}
// Throws if every transport mechanism in tau3 vanishes.
TauTriple compute_tau(double h_k, double mu_u, double u_norm, double d_loc,
                      double alpha, double rho, const StabConstants& c);

// tau' = (M/dt + tau^{-1})^{-1}:
//   tau1' = tau1 dt / (dt + rho tau1),  tau2' = tau2,
//   tau3' = tau3 dt / (dt + tau3).
// QuasiStatic mode keeps tau' = tau.
TauTriple dynamic_tau(const TauTriple& tau, double rho, double dt,
                      SubscaleMode mode);

// Components of the subscale history vector d; the pressure slot d2 is
// structurally zero (zero row of the mass matrix).
struct SubscaleVector {
    Eigen::Vector2d d1 = Eigen::Vector2d::Zero();
    double d2 = 0.0;
    double d3 = 0.0;
};

// Gains applied to the residual when forming d. Geometric limits:
//   g1 = rho tau1' / (dt - rho tau1'),  g3 = tau3' / (dt - tau3').
// A truncation order m >= 1 replaces each limit by the m-term partial sum
// of powers of (rho tau1'/dt) resp. (tau3'/dt).
struct SubscaleGains {
    double g1 = 0.0;
    double g3 = 0.0;
};

SubscaleGains subscale_gains(const TauTriple& tau_prime, double rho, double dt,
                             SubscaleMode mode, int truncation);

// d applied to the residual r = F - M dU/dt - L(u; U).
SubscaleVector subscale_history(const Eigen::Vector2d& r_momentum,
                                double r_transport, const TauTriple& tau_prime,
                                double rho, double dt, SubscaleMode mode,
                                int truncation = 0);

}  // namespace nsadr
