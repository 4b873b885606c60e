// ============================================================================
// assembly.hpp — monolithic theta-step system assembly (Galerkin / ASGS)
// ============================================================================
#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>

#include "nsadr/fem.hpp"
#include "nsadr/mesh.hpp"
#include "nsadr/models.hpp"
#include "nsadr/stabilization.hpp"

namespace nsadr {

enum class Method { Galerkin, ASGS };

using SpMat = Eigen::SparseMatrix<double>;

// Nodal fields at one time level. The monolithic system orders unknowns
// (u1, u2, p, c) per node.
struct CoupledState {
    Eigen::VectorXd u1, u2, p, c;
    double t = 0.0;

    static CoupledState zero(int n_nodes, double t = 0.0);
    int n_nodes() const { return static_cast<int>(u1.size()); }
};

inline int dof_index(int node, int comp) { return 4 * node + comp; }

struct SparseSystem {
    SpMat matrix;
    Eigen::VectorXd rhs;

    int n_dofs() const { return static_cast<int>(rhs.size()); }
};

// Body force / solute source closures evaluated at (x, y, t).
struct Forcing {
    std::function<Eigen::Vector2d(double, double, double)> f;
    std::function<double(double, double, double)> g;

    static Forcing zero();
    static Forcing manufactured(const CaseSetup& cs);
};

// Per-step assembly bookkeeping used by tests.
struct AssemblyDiagnostics {
    double tau1_min = 0.0, tau1_max = 0.0;
    double tau2_min = 0.0, tau2_max = 0.0;
    double tau3_min = 0.0, tau3_max = 0.0;
    // Largest |coefficient| of the subscale terms tested against V_h
    // (the (I - tau^{-1} tau') family). Identically zero in QuasiStatic mode.
    double max_vpair_coeff = 0.0;
};

// Dynamic subscales tracked at the quadrature points of every element,
// advanced by u~^{n+1} = tau' R^{n+1} + (tau' M/dt) u~^n. The pressure slot
// of the history d = (M/dt) u~^n is structurally zero, so only the velocity
// pair and the concentration slot are stored.
struct SubscaleField {
    Eigen::MatrixXd v1, v2, c;  // n_triangles x n_quadrature_points

    static SubscaleField zero(int n_elements, int n_qpoints);
    bool empty() const { return v1.size() == 0; }
};

// Assembles the linear system for one theta step: the solution vector is
// U^{n+1}, the unknown enters the spatial operator through
// U^{n,theta} = (1+theta)/2 U^{n+1} + (1-theta)/2 U^n, the advecting
// velocity and the viscosity argument are lagged at t^n, and forcing is
// evaluated at t^{n,theta}. Boundary conditions are not applied here.
// coeff_state, when given, supplies the advecting velocity and viscosity
// argument instead of state_n (Picard iterations); the time-history terms
// always come from state_n. subscale carries u~^n for the Dynamic mode
// (null means a zero initial subscale).
SparseSystem assemble_step(const StructuredTriMesh& mesh,
                           const QuadratureRule& quad,
                           const CoupledState& state_n, double dt, double theta,
                           const CaseSetup& cs, const Forcing& forcing,
                           Method method, const StabConstants& stab,
                           AssemblyDiagnostics* diag = nullptr,
                           const CoupledState* coeff_state = nullptr,
                           const SubscaleField* subscale = nullptr);

// Advances the quadrature-point subscales from the solved step. With
// stab.truncation == 1 the history term is dropped (single-step subscale).
void update_subscale_field(const StructuredTriMesh& mesh,
                           const QuadratureRule& quad,
                           const CoupledState& state_n,
                           const CoupledState& state_np1, double theta,
                           double dt, const CaseSetup& cs,
                           const Forcing& forcing, const StabConstants& stab,
                           SubscaleField& field);

// Convection block C(a) over velocity dofs (2 per node, interleaved), built
// from the skew-symmetrized trilinear form
//   c(a, u, v) = rho int ((a.grad)u).v + rho/2 int (div a) u.v
// so that v^T C(a) v = 0 for any discrete v vanishing on the boundary.
SpMat assemble_convection_block(const StructuredTriMesh& mesh,
                                const QuadratureRule& quad,
                                const Eigen::VectorXd& a1,
                                const Eigen::VectorXd& a2, double rho = 1.0);

// Replaces boundary velocity/concentration rows by identity rows with zero
// right-hand side and eliminates the matching columns. Pressure rows are
// untouched except for the optional pinned node.
void apply_dirichlet(SparseSystem& system, const StructuredTriMesh& mesh,
                     int pressure_pin_node = -1,
                     double pressure_pin_value = 0.0);

}  // namespace nsadr
