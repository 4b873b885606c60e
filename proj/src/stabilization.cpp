#include "nsadr/stabilization.hpp"

#include <cmath>
#include <stdexcept>

namespace nsadr {

TauTriple compute_tau(double h_k, double mu_u, double u_norm, double d_loc,
                      double alpha, double rho, const StabConstants& c) {
    if (h_k <= 0.0) throw std::invalid_argument("compute_tau: h_k must be > 0");
    if (mu_u <= 0.0) throw std::invalid_argument("compute_tau: mu_u must be > 0");
    if (u_norm < 0.0 || d_loc < 0.0 || alpha < 0.0)
        throw std::invalid_argument("compute_tau: negative transport coefficient");
    if (d_loc == 0.0 && u_norm == 0.0 && alpha == 0.0)
        throw std::invalid_argument(
            "compute_tau: no transport mechanism (D, |u|, alpha all zero)");

    TauTriple tau;
    const double inv1 = c.c1 * mu_u / (h_k * h_k) + c.c2 * rho * u_norm / h_k;
    tau.tau1 = 1.0 / inv1;
    tau.tau2 = h_k * h_k / (c.c1 * tau.tau1);
    const double inv3 = 9.0 * d_loc / (4.0 * h_k * h_k) +
                        3.0 * u_norm / (2.0 * h_k) + alpha;
    tau.tau3 = c.c3 / inv3;

    tau.tau1 *= c.tau_scale;
    tau.tau2 *= c.tau_scale;
    tau.tau3 *= c.tau_scale;
    return tau;
}

TauTriple dynamic_tau(const TauTriple& tau, double rho, double dt,
                      SubscaleMode mode) {
    if (mode == SubscaleMode::QuasiStatic) return tau;
    if (dt <= 0.0) throw std::invalid_argument("dynamic_tau: dt must be > 0");
    TauTriple tp;
    tp.tau1 = tau.tau1 * dt / (dt + rho * tau.tau1);
    tp.tau2 = tau.tau2;  // zero mass entry in the continuity row
    tp.tau3 = tau.tau3 * dt / (dt + tau.tau3);
    return tp;
}

namespace {

double gain(double mass, double tau_prime, double dt, int truncation) {
    const double q = mass * tau_prime / dt;  // < 1 by construction
    if (q == 0.0) return 0.0;
    if (truncation <= 0) return q / (1.0 - q);  // sum_{i>=1} q^i
    double sum = 0.0, term = 1.0;
    for (int i = 1; i <= truncation; ++i) {
        term *= q;
        sum += term;
    }
    return sum;
}

}  // namespace

SubscaleGains subscale_gains(const TauTriple& tau_prime, double rho, double dt,
                             SubscaleMode mode, int truncation) {
    SubscaleGains g;
    if (mode == SubscaleMode::QuasiStatic) return g;
    g.g1 = gain(rho, tau_prime.tau1, dt, truncation);
    g.g3 = gain(1.0, tau_prime.tau3, dt, truncation);
    return g;
}

SubscaleVector subscale_history(const Eigen::Vector2d& r_momentum,
                                double r_transport, const TauTriple& tau_prime,
                                double rho, double dt, SubscaleMode mode,
                                int truncation) {
    SubscaleVector d;
    if (mode == SubscaleMode::QuasiStatic) return d;
    const SubscaleGains g = subscale_gains(tau_prime, rho, dt, mode, truncation);
    d.d1 = g.g1 * r_momentum;
    d.d2 = 0.0;  // diag(rho, rho, 0, 1): the pressure row carries no history
    d.d3 = g.g3 * r_transport;
    return d;
}

}  // namespace nsadr
