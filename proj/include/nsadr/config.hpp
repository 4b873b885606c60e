// ============================================================================
// config.hpp — study configuration, flat key=value parsing, validation
// ============================================================================
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nsadr/assembly.hpp"
#include "nsadr/estimator.hpp"
#include "nsadr/linear_solver.hpp"
#include "nsadr/stabilization.hpp"

namespace nsadr {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StudyConfig {
    std::string case_key = "I-a";
    std::vector<int> grids = {10, 20, 40, 80};
    std::vector<double> dts = {0.1, 0.05, 0.025, 0.0125};
    double theta = 1.0;
    double T = 1.0;
    std::vector<Method> methods = {Method::Galerkin, Method::ASGS};
    StabConstants stab;
    SolverConfig solver;
    int picard_iters = 0;
    bool estimate = false;
    EstimatorAdvection estimator_advection = EstimatorAdvection::Discrete;
    int jobs = 1;
    std::string out_path;
};

// Flat key=value file; '#' starts a comment, blank lines ignored. Unknown
// keys are rejected. Recognized keys:
//   case, grids, dts, method, methods, time.theta, time.dt, time.T,
//   stab.c1, stab.c2, stab.c3, stab.subscale_mode, stab.tau_scale,
//   stab.truncation, solver.method, solver.tol, solver.max_iters,
//   solver.pressure_fix, picard_iters, estimate, estimator.advection,
//   jobs, out
StudyConfig parse_config_file(const std::string& path);

// Applies one key=value override (command line has highest precedence).
void apply_override(StudyConfig& cfg, const std::string& key,
                    const std::string& value);

// Cross-field checks: paired list lengths, doubling grids, admissible theta,
// dt dividing T.
void validate(const StudyConfig& cfg);

std::string method_name(Method m);
Method parse_method(const std::string& name);

}  // namespace nsadr
