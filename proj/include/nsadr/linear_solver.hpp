// ============================================================================
// linear_solver.hpp — per-step sparse solve and pressure nullspace handling
// ============================================================================
#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "nsadr/assembly.hpp"
#include "nsadr/mesh.hpp"

namespace nsadr {

enum class SolverMethod { DirectLU, BiCgStabIlu };
enum class PressureFix { PinNode, MeanShift };

struct SolverConfig {
    SolverMethod method = SolverMethod::DirectLU;
    double tol = 1e-10;  // relative residual
    int max_iters = 2000;
    PressureFix pressure_fix = PressureFix::PinNode;
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;        // 0 for the direct path
    double rel_residual = 0.0; // recomputed as |Ax-b| / |b|
    bool used_direct_fallback = false;
};

// Stateful so the direct path reuses the symbolic factorization across time
// steps (the sparsity pattern is fixed for a given mesh and method).
class LinearSolver {
  public:
    explicit LinearSolver(SolverConfig cfg = {}) : cfg_(cfg) {}

    // Solves A x = b. The iterative path falls back to the direct solver on
    // breakdown or non-convergence; a hard direct failure throws.
    SolveReport solve(const SpMat& A, const Eigen::VectorXd& b,
                      Eigen::VectorXd& x);

    const SolverConfig& config() const { return cfg_; }

  private:
    SolveReport solve_direct(const SpMat& A, const Eigen::VectorXd& b,
                             Eigen::VectorXd& x);

    SolverConfig cfg_;
    Eigen::SparseLU<SpMat> lu_;
    bool pattern_analyzed_ = false;
};

// Area-weighted mean of a P1 nodal field over the unit square.
double pressure_mean(const StructuredTriMesh& mesh, const Eigen::VectorXd& p);

// Shifts p so that its integral over the domain vanishes.
void fix_pressure_nullspace(const StructuredTriMesh& mesh, Eigen::VectorXd& p);

}  // namespace nsadr
