// ============================================================================
// time_stepper.hpp — theta-scheme time integration driver
// ============================================================================
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nsadr/assembly.hpp"
#include "nsadr/estimator.hpp"
#include "nsadr/linear_solver.hpp"
#include "nsadr/norms.hpp"

namespace nsadr {

// theta = 0: Crank-Nicolson; theta = 1: backward Euler.
// t^{n,theta} = t^n + (1+theta) dt / 2.
struct SchemeConfig {
    double theta = 1.0;
    double dt = 0.1;
    double T = 1.0;
    int n_steps = 10;

    static SchemeConfig make(double theta, double dt, double T);
};

// L2 projection of the initial data onto the zero-boundary P1 space
// (mass-matrix solve per component); the pressure is interpolated nodally.
CoupledState initialize(const StructuredTriMesh& mesh, const QuadratureRule& quad,
                        const std::function<double(double, double)>& u1_0,
                        const std::function<double(double, double)>& u2_0,
                        const std::function<double(double, double)>& c_0,
                        const std::function<double(double, double)>& p_0);

// Manufactured initial data at t = 0.
CoupledState initialize_manufactured(const StructuredTriMesh& mesh,
                                     const QuadratureRule& quad);

struct StepDiagnostics {
    SolveReport solve;
    AssemblyDiagnostics assembly;
};

// One theta step: assemble, constrain, solve, recover U^{n+1}, re-zero the
// Dirichlet values exactly and shift the pressure to zero mean. In Dynamic
// ASGS mode, subscale carries u~^n in and u~^{n+1} out.
CoupledState step(const StructuredTriMesh& mesh, const QuadratureRule& quad,
                  const CoupledState& state_n, const SchemeConfig& scheme,
                  const CaseSetup& cs, const Forcing& forcing, Method method,
                  const StabConstants& stab, LinearSolver& solver,
                  double pressure_pin_value = 0.0, int picard_iters = 0,
                  StepDiagnostics* diag = nullptr,
                  SubscaleField* subscale = nullptr);

struct RunOptions {
    SchemeConfig scheme;
    Method method = Method::ASGS;
    StabConstants stab;
    SolverConfig solver;
    int picard_iters = 0;
    bool with_norms = true;
    bool with_estimator = false;
    EstimatorAdvection estimator_advection = EstimatorAdvection::Discrete;
    bool store_trajectory = false;
    // Pressure value pinned at node (0,0) during the solve, as a function of
    // t^{n+1}; null pins zero. Only used with PressureFix::PinNode.
    std::function<double(double)> pin_value;
};

struct RunResult {
    ErrorReport errors;
    double eta = 0.0;          // final-step indicator (with_estimator)
    ResidualField residuals;   // final-step residual field (with_estimator)
    CoupledState final_state;
    std::vector<CoupledState> trajectory;  // store_trajectory only
    int steps = 0;
    long total_iterations = 0;
    bool any_direct_fallback = false;
    double max_abs_d2 = 0.0;   // subscale pressure-slot history, always 0
};

// Runs N steps from the manufactured initial state, accumulating the study
// norms in streaming fashion.
RunResult run(const StructuredTriMesh& mesh, const QuadratureRule& quad,
              const CaseSetup& cs, const Forcing& forcing,
              const RunOptions& opts);

}  // namespace nsadr
