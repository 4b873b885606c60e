// ============================================================================
// norms.hpp — space-time error norms for the convergence studies
// ============================================================================
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>

#include "nsadr/assembly.hpp"
#include "nsadr/fem.hpp"
#include "nsadr/mesh.hpp"

namespace nsadr {

// Reference fields the discrete trajectory is measured against.
struct ExactFields {
    std::function<Eigen::Vector2d(double, double, double)> velocity;
    std::function<Eigen::Matrix2d(double, double, double)> velocity_gradient;
    std::function<double(double, double, double)> pressure;
    std::function<double(double, double, double)> concentration;
    std::function<Eigen::Vector2d(double, double, double)> concentration_gradient;

    static ExactFields manufactured();
};

// Squared accumulators of the study norms:
//   |g|^2_{L2(L2)} = sum_n dt |g^{n,theta}|^2_{L2}
//   |g|^2_{L2(H1)} = sum_n dt (|g^{n,theta}|^2 + |grad g^{n,theta}|^2)
//   |g|^2_V~      = max_n |g^n|^2 + |g|^2_{L2(H1)}
// total = sqrt(|e_u|^2_V~ + |e_p|^2_{L2(L2)} + |e_c|^2_V~).
struct ErrorReport {
    double u_max_l2 = 0.0, u_l2h1 = 0.0;
    double c_max_l2 = 0.0, c_l2h1 = 0.0;
    double p_l2l2 = 0.0;

    double tilde_v_u() const { return std::sqrt(u_max_l2 + u_l2h1); }
    double tilde_v_c() const { return std::sqrt(c_max_l2 + c_l2h1); }
    double l2l2_p() const { return std::sqrt(p_l2l2); }
    double total() const {
        return std::sqrt(u_max_l2 + u_l2h1 + p_l2l2 + c_max_l2 + c_l2h1);
    }
};

class ErrorAccumulator {
  public:
    ErrorAccumulator(const StructuredTriMesh& mesh, const QuadratureRule& quad,
                     ExactFields exact);

    // Endpoint contribution of the initial state (the max-in-time terms
    // include n = 0).
    void start(const CoupledState& s0);

    // One interval [t^n, t^{n+1}]: interval terms use the theta-combination
    // of the discrete states against the exact solution at t^{n,theta};
    // endpoint terms update the running max at t^{n+1}.
    void add_interval(const CoupledState& sn, const CoupledState& snp1,
                      double theta, double dt);

    ErrorReport report() const { return rep_; }

  private:
    void endpoint(const CoupledState& s);

    const StructuredTriMesh& mesh_;
    const QuadratureRule& quad_;
    ExactFields exact_;
    ErrorReport rep_;
};

// log2(err_coarse / err_fine) for grids refined by a factor of 2.
double rate_of_convergence(double err_coarse, double err_fine);

}  // namespace nsadr
