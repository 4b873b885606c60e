#include "nsadr/models.hpp"

#include <cmath>
#include <stdexcept>

namespace nsadr {

double ViscosityModel::operator()(double c) const {
    if (kind == Kind::Constant) return mu0;
    return mu0 * std::exp(a * b * c);
}

ViscosityModel ViscosityModel::constant(double mu) {
    ViscosityModel m;
    m.kind = Kind::Constant;
    m.mu0 = mu;
    return m;
}

ViscosityModel ViscosityModel::exponential(double mu0, double a, double b) {
    ViscosityModel m;
    m.kind = Kind::Exponential;
    m.mu0 = mu0;
    m.a = a;
    m.b = b;
    return m;
}

namespace {
inline double sq(double v) { return v * v; }
}  // namespace

std::pair<double, double> DiffusionField::operator()(double x, double y,
                                                     double t) const {
    if (kind == Kind::Constant) return {constant, constant};
    const double et = std::exp(-t);
    const double d1 = et * sq(y) * sq(y - 1.0) * sq(2.0 * y - 1.0) * sq(sq(x)) * sq(sq(x - 1.0));
    const double d2 = et * sq(x) * sq(x - 1.0) * sq(2.0 * x - 1.0) * sq(sq(y)) * sq(sq(y - 1.0));
    return {d1, d2};
}

double DiffusionField::d1_dx(double x, double y, double t) const {
    if (kind == Kind::Constant) return 0.0;
    // d/dx [x^4 (x-1)^4] = 4 x^3 (x-1)^3 (2x-1)
    const double et = std::exp(-t);
    return et * sq(y) * sq(y - 1.0) * sq(2.0 * y - 1.0) *
           4.0 * x * x * x * (x - 1.0) * (x - 1.0) * (x - 1.0) * (2.0 * x - 1.0);
}

double DiffusionField::d2_dy(double x, double y, double t) const {
    if (kind == Kind::Constant) return 0.0;
    const double et = std::exp(-t);
    return et * sq(x) * sq(x - 1.0) * sq(2.0 * x - 1.0) *
           4.0 * y * y * y * (y - 1.0) * (y - 1.0) * (y - 1.0) * (2.0 * y - 1.0);
}

DiffusionField DiffusionField::isotropic(double d) {
    DiffusionField f;
    f.kind = Kind::Constant;
    f.constant = d;
    return f;
}

DiffusionField DiffusionField::manufactured() {
    DiffusionField f;
    f.kind = Kind::Manufactured;
    return f;
}

CaseSetup make_case(const std::string& key) {
    CaseSetup cs;
    cs.key = key;
    cs.params.rho = 1.0;
    cs.params.alpha = 0.01;
    cs.params.T = 1.0;

    if (key == "I-a") {
        cs.viscosity = ViscosityModel::constant(1.0 / 50.0);
        cs.diffusion = DiffusionField::isotropic(2.0);
    } else if (key == "I-b") {
        cs.viscosity = ViscosityModel::constant(1.0 / 500.0);
        cs.diffusion = DiffusionField::isotropic(2.0);
    } else if (key == "I-c") {
        cs.viscosity = ViscosityModel::constant(1.0 / 5000.0);
        cs.diffusion = DiffusionField::isotropic(2.0);
    } else if (key == "II-a") {
        cs.viscosity = ViscosityModel::exponential(0.00954, 27.93, 0.028);
        cs.diffusion = DiffusionField::manufactured();
    } else if (key == "II-b") {
        cs.viscosity = ViscosityModel::exponential(0.0000954, 27.93, 0.028);
        cs.diffusion = DiffusionField::manufactured();
    } else {
        throw std::invalid_argument("make_case: unknown case key '" + key +
                                    "' (expected I-a, I-b, I-c, II-a, II-b)");
    }
    return cs;
}

}  // namespace nsadr
