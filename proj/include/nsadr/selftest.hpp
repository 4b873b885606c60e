// ============================================================================
// selftest.hpp — fast property suite exposed by the CLI
// ============================================================================
#pragma once

#include <iosfwd>

namespace nsadr {

// Runs the structural property checks (convection skew identity, subscale
// pressure-slot vanishing, quasi-static term structure, tau positivity and
// tau' < tau, forcing vs finite-difference oracle, interpolation orders,
// solver residual and pressure-mean fix, zero-data invariance). Prints one
// line per check; returns true when every check passes. Runs in well under
// a minute.
bool run_selftest(std::ostream& out);

}  // namespace nsadr
