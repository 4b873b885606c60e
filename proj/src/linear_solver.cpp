#include "nsadr/linear_solver.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <stdexcept>

namespace nsadr {

SolveReport LinearSolver::solve_direct(const SpMat& A, const Eigen::VectorXd& b,
                                       Eigen::VectorXd& x) {
    if (!pattern_analyzed_) {
        lu_.analyzePattern(A);
        pattern_analyzed_ = true;
    }
    lu_.factorize(A);
    if (lu_.info() != Eigen::Success)
        throw std::runtime_error("LinearSolver: sparse LU factorization failed");
    x = lu_.solve(b);

    SolveReport rep;
    rep.converged = true;
    const double bn = b.norm();
    rep.rel_residual = (A * x - b).norm() / (bn > 0.0 ? bn : 1.0);
    return rep;
}

SolveReport LinearSolver::solve(const SpMat& A, const Eigen::VectorXd& b,
                                Eigen::VectorXd& x) {
    if (A.rows() != A.cols() || A.rows() != b.size())
        throw std::invalid_argument("LinearSolver: dimension mismatch");
    if (!b.allFinite())
        throw std::invalid_argument("LinearSolver: non-finite right-hand side");

    if (cfg_.method == SolverMethod::DirectLU) return solve_direct(A, b, x);

    Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> bicg;
    bicg.setTolerance(cfg_.tol);
    bicg.setMaxIterations(cfg_.max_iters);
    bicg.compute(A);

    SolveReport rep;
    if (bicg.info() == Eigen::Success) {
        x = bicg.solve(b);
        rep.iterations = static_cast<int>(bicg.iterations());
        const double bn = b.norm();
        rep.rel_residual = (A * x - b).norm() / (bn > 0.0 ? bn : 1.0);
        rep.converged = bicg.info() == Eigen::Success && x.allFinite() &&
                        rep.rel_residual <= cfg_.tol * 10.0;
    }
    if (!rep.converged) {
        // Breakdown or stagnation: retry with the robust path.
        rep = solve_direct(A, b, x);
        rep.used_direct_fallback = true;
    }
    return rep;
}

double pressure_mean(const StructuredTriMesh& mesh, const Eigen::VectorXd& p) {
    if (p.size() != mesh.n_nodes())
        throw std::invalid_argument("pressure_mean: field size mismatch");
    // Exact integral of a P1 field: sum_k area_k * (p_i + p_j + p_l) / 3,
    // divided by the domain area (= 1).
    double integral = 0.0;
    for (int k = 0; k < mesh.n_triangles(); ++k) {
        const ElementGeometry geo = element_geometry(mesh, k);
        const double s = p(mesh.triangles(k, 0)) + p(mesh.triangles(k, 1)) +
                         p(mesh.triangles(k, 2));
        integral += geo.area * s / 3.0;
    }
    return integral;
}

void fix_pressure_nullspace(const StructuredTriMesh& mesh, Eigen::VectorXd& p) {
    p.array() -= pressure_mean(mesh, p);
}

}  // namespace nsadr
