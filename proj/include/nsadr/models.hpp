// ============================================================================
// models.hpp — physical coefficient models and experiment case registry
// ============================================================================
#pragma once

#include <string>
#include <utility>

namespace nsadr {

// Dynamic viscosity law: constant, or mu0 * exp(a*b*c) with c the local
// solute concentration.
struct ViscosityModel {
    enum class Kind { Constant, Exponential };
    Kind kind = Kind::Constant;
    double mu0 = 1.0;
    double a = 0.0;
    double b = 0.0;

    double operator()(double c) const;

    static ViscosityModel constant(double mu);
    static ViscosityModel exponential(double mu0, double a, double b);
};

// Anisotropic diffusion pair (D1, D2): isotropic constant, or the
// space-time polynomial fields used by the two-way coupled cases:
//   D1 = e^{-t} y^2(y-1)^2(2y-1)^2 x^4(x-1)^4
//   D2 = e^{-t} x^2(x-1)^2(2x-1)^2 y^4(y-1)^4
struct DiffusionField {
    enum class Kind { Constant, Manufactured };
    Kind kind = Kind::Constant;
    double constant = 1.0;

    std::pair<double, double> operator()(double x, double y, double t) const;
    double d1_dx(double x, double y, double t) const;  // dD1/dx
    double d2_dy(double x, double y, double t) const;  // dD2/dy

    static DiffusionField isotropic(double d);
    static DiffusionField manufactured();
};

struct PhysicalParams {
    double rho = 1.0;    // fluid density
    double alpha = 0.01; // reaction coefficient
    double T = 1.0;      // final time
};

// One experiment configuration.
struct CaseSetup {
    std::string key;
    ViscosityModel viscosity;
    DiffusionField diffusion;
    PhysicalParams params;
};

// Case keys:
//   I-a, I-b, I-c : constant viscosity mu = 1/Re for Re = 50, 500, 5000
//                   (rho = 1), isotropic D = 2, alpha = 0.01.
//   II-a          : mu(c) = 0.00954  e^{27.93 x 0.028 c}, manufactured D.
//   II-b          : mu(c) = 0.0000954 e^{27.93 x 0.028 c}, manufactured D.
CaseSetup make_case(const std::string& key);

}  // namespace nsadr
