// ============================================================================
// estimator.hpp — residual-based aposteriori error indicator
// ============================================================================
#pragma once

#include <Eigen/Core>

#include "nsadr/assembly.hpp"
#include "nsadr/fem.hpp"
#include "nsadr/mesh.hpp"

namespace nsadr {

// Advecting velocity used inside the transport residual R3. A computable
// estimator must use the discrete velocity; the exact option exists for
// manufactured-solution studies where u is known.
enum class EstimatorAdvection { Discrete, Exact };

// Per-element L2 norms of the strong residuals
//   R1 = f - (rho du/dt + rho (u_h.grad)u_h + grad p_h)      (P1: no Laplacian)
//   R2 = -div u_h
//   R3 = g - (dc/dt - div(D grad c_h) + a.grad c_h + alpha c_h)
// with the variable-diffusion divergence kept analytically through the
// first-derivative terms of D. The global indicator aggregates with the
// h^2 weighting: eta^2 = sum_k h_k^2 (|R1|^2_k + |R2|^2_k + |R3|^2_k).
struct ResidualField {
    Eigen::VectorXd r1, r2, r3;  // per-element L2 norms
    double r1_total = 0.0, r2_total = 0.0, r3_total = 0.0;
    double eta = 0.0;
};

ResidualField compute_residuals(const StructuredTriMesh& mesh,
                                const QuadratureRule& quad,
                                const CoupledState& state_n,
                                const CoupledState& state_np1, double theta,
                                double dt, const CaseSetup& cs,
                                const Forcing& forcing,
                                EstimatorAdvection adv = EstimatorAdvection::Discrete);

}  // namespace nsadr
