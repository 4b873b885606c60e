// ============================================================================
// study.hpp — convergence-study orchestration and table/CSV emission
// ============================================================================
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "nsadr/config.hpp"
#include "nsadr/norms.hpp"

namespace nsadr {

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StudyRow {
    Method method = Method::Galerkin;
    int n_div = 0;
    double dt = 0.0;
    double total_error = 0.0;
    double roc = std::numeric_limits<double>::quiet_NaN();  // blank on coarsest
    double eta = std::numeric_limits<double>::quiet_NaN();
    double walltime_s = 0.0;
    ErrorReport detail;
};

struct ConvergenceReport {
    StudyConfig config;
    std::vector<StudyRow> rows;  // method-major, grids ascending
};

// Runs every (method, grid) cell of the study. Cells are independent; with
// jobs > 1 they execute concurrently and the rows are still emitted in
// deterministic order. Any cell failure aborts with a diagnostic naming the
// failing configuration.
ConvergenceReport run_study(const StudyConfig& cfg);

// CSV schema: case,method,theta,n_div,dt,total_error,roc,eta,walltime_s.
// All result columns are deterministic for a fixed config.
void write_csv(const ConvergenceReport& report, std::ostream& out);

// Paper-style side-by-side table (one column pair per method).
void print_table(const ConvergenceReport& report, std::ostream& out);

}  // namespace nsadr
