#include "nsadr/assembly.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nsadr/mms.hpp"

namespace nsadr {

namespace {
// Equal-order P1/P1 leaves a multi-dimensional discrete pressure kernel on
// this mesh family (beyond the constant mode), so the unstabilized system is
// exactly singular while remaining consistent. This machine-scale mass
// penalty on the continuity row selects the small-norm pressure
// representative; it perturbs the divergence constraint by eps*p, orders of
// magnitude below the discretization error.
constexpr double kPressurePenalty = 1e-8;

// Shared between step assembly and the subscale update: per-element tau from
// the lagged coefficient fields (element-mean velocity magnitude, max of
// mu(c) over the quadrature points, mean of max(D1, D2)).
TauTriple element_tau(const ElementGeometry& geo, const QuadratureRule& quad,
                      const double a1n[3], const double a2n[3],
                      const double cl[3], const CaseSetup& cs,
                      const StabConstants& stab, double t_theta) {
    const Eigen::Vector2d u_mean((a1n[0] + a1n[1] + a1n[2]) / 3.0,
                                 (a2n[0] + a2n[1] + a2n[2]) / 3.0);
    double mu_u = 0.0, d_loc = 0.0;
    for (int q = 0; q < quad.size(); ++q) {
        const Eigen::Vector3d N =
            ReferenceElement::shape(quad.points(q, 0), quad.points(q, 1));
        const Eigen::Vector2d xq = geo.coords.transpose() * N;
        const double c_q = N(0) * cl[0] + N(1) * cl[1] + N(2) * cl[2];
        mu_u = std::max(mu_u, cs.viscosity(c_q));
        const auto [d1, d2] = cs.diffusion(xq(0), xq(1), t_theta);
        d_loc += std::max(d1, d2);
    }
    d_loc /= quad.size();
    return compute_tau(geo.h_k, mu_u, u_mean.norm(), d_loc, cs.params.alpha,
                       cs.params.rho, stab);
}

}  // namespace

SubscaleField SubscaleField::zero(int n_elements, int n_qpoints) {
    SubscaleField f;
    f.v1 = Eigen::MatrixXd::Zero(n_elements, n_qpoints);
    f.v2 = Eigen::MatrixXd::Zero(n_elements, n_qpoints);
    f.c = Eigen::MatrixXd::Zero(n_elements, n_qpoints);
    return f;
}

CoupledState CoupledState::zero(int n_nodes, double t) {
    CoupledState s;
    s.u1 = Eigen::VectorXd::Zero(n_nodes);
    s.u2 = Eigen::VectorXd::Zero(n_nodes);
    s.p = Eigen::VectorXd::Zero(n_nodes);
    s.c = Eigen::VectorXd::Zero(n_nodes);
    s.t = t;
    return s;
}

Forcing Forcing::zero() {
    Forcing f;
    f.f = [](double, double, double) { return Eigen::Vector2d::Zero().eval(); };
    f.g = [](double, double, double) { return 0.0; };
    return f;
}

Forcing Forcing::manufactured(const CaseSetup& cs) {
    Forcing f;
    f.f = [cs](double x, double y, double t) { return mms::forcing_f(x, y, t, cs); };
    f.g = [cs](double x, double y, double t) { return mms::forcing_g(x, y, t, cs); };
    return f;
}

SparseSystem assemble_step(const StructuredTriMesh& mesh,
                           const QuadratureRule& quad,
                           const CoupledState& state_n, double dt, double theta,
                           const CaseSetup& cs, const Forcing& forcing,
                           Method method, const StabConstants& stab,
                           AssemblyDiagnostics* diag,
                           const CoupledState* coeff_state,
                           const SubscaleField* subscale) {
    if (dt <= 0.0) throw std::invalid_argument("assemble_step: dt must be > 0");
    if (theta != 0.0 && theta != 1.0)
        throw std::invalid_argument("assemble_step: theta must be 0 or 1");
    if (state_n.n_nodes() != mesh.n_nodes())
        throw std::invalid_argument("assemble_step: state/mesh size mismatch");
    if (!state_n.u1.allFinite() || !state_n.u2.allFinite() ||
        !state_n.p.allFinite() || !state_n.c.allFinite())
        throw std::runtime_error("assemble_step: NaN in lagged state");
    const CoupledState& lag = coeff_state ? *coeff_state : state_n;
    if (lag.n_nodes() != mesh.n_nodes())
        throw std::invalid_argument("assemble_step: coeff state size mismatch");

    const double rho = cs.params.rho;
    const double alpha = cs.params.alpha;
    const double beta_p = 0.5 * (1.0 + theta);  // weight of U^{n+1} in U^{n,theta}
    const double beta_m = 0.5 * (1.0 - theta);  // weight of U^n
    const double t_theta = state_n.t + beta_p * dt;

    const int n_dofs = 4 * mesh.n_nodes();
    const int nq = quad.size();
    const bool asgs = (method == Method::ASGS);
    const bool dynamic = asgs && stab.mode == SubscaleMode::Dynamic;
    // In QuasiStatic mode the subscale residual carries no discrete
    // time-derivative: the standard steady terms tau (L U - F) remain.
    const double mass_on = dynamic ? 1.0 : 0.0;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(mesh.n_triangles()) * 144);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_dofs);

    if (diag) {
        *diag = AssemblyDiagnostics{};
        diag->tau1_min = diag->tau2_min = diag->tau3_min = 1e300;
    }

    Eigen::Matrix<double, 12, 12> A_loc;
    Eigen::Matrix<double, 12, 1> b_loc;

    // Per-dof ASGS work arrays (trial residual rows, test pairings).
    double r1x[12], r1y[12], r2[12], r3[12];
    double q1x[12], q1y[12], q2[12], q3[12];
    double v1x[12], v1y[12], v2[12], v3[12];

    for (int k = 0; k < mesh.n_triangles(); ++k) {
        const ElementGeometry geo = element_geometry(mesh, k);
        if (geo.area <= 0.0)
            throw std::runtime_error("assemble_step: degenerate element");
        const Eigen::Matrix<double, 3, 2> G = physical_gradients(geo.jacobian);
        const double jac2 = 2.0 * geo.area;  // |det J|

        int nd[3];
        double u1n[3], u2n[3], pn[3], cn[3];   // history operands (t^n)
        double a1n[3], a2n[3], cl[3];          // lagged coefficient fields
        for (int a = 0; a < 3; ++a) {
            nd[a] = mesh.triangles(k, a);
            u1n[a] = state_n.u1(nd[a]);
            u2n[a] = state_n.u2(nd[a]);
            pn[a] = state_n.p(nd[a]);
            cn[a] = state_n.c(nd[a]);
            a1n[a] = lag.u1(nd[a]);
            a2n[a] = lag.u2(nd[a]);
            cl[a] = lag.c(nd[a]);
        }

        // Constant per element (P1): gradients of the time-level-n fields
        // and the divergence of the advecting field.
        Eigen::Matrix2d grad_un;  // row i = grad u_i^n
        grad_un.setZero();
        Eigen::Vector2d grad_pn = Eigen::Vector2d::Zero();
        Eigen::Vector2d grad_cn = Eigen::Vector2d::Zero();
        double div_adv = 0.0;
        for (int a = 0; a < 3; ++a) {
            grad_un.row(0) += u1n[a] * G.row(a);
            grad_un.row(1) += u2n[a] * G.row(a);
            grad_pn += pn[a] * G.row(a).transpose();
            grad_cn += cn[a] * G.row(a).transpose();
            div_adv += a1n[a] * G(a, 0) + a2n[a] * G(a, 1);
        }
        const double div_un = grad_un(0, 0) + grad_un(1, 1);

        // Stabilization parameters from the lagged state. Dynamic mode uses
        // tau' on the adjoint pairing, the (I - tau^{-1} tau') = M tau'/dt
        // weights on the plain pairing, and the previous subscale through
        // d = (M/dt) u~^n; QuasiStatic keeps the steady tau terms only.
        TauTriple tau{}, tau_p{};
        double A1 = 0.0, A2 = 0.0, A3 = 0.0;  // -L* pairing weights
        double W1 = 0.0, W3 = 0.0;            // V pairing weights (subtracted)
        double ratio1 = 0.0, ratio3 = 0.0;    // tau^{-1} tau' diagonal
        if (asgs) {
            tau = element_tau(geo, quad, a1n, a2n, cl, cs, stab, t_theta);
            tau_p = dynamic_tau(tau, rho, dt, stab.mode);

            if (dynamic) {
                A1 = tau_p.tau1;
                A2 = tau_p.tau2;
                A3 = tau_p.tau3;
                W1 = rho * tau_p.tau1 / dt;
                W3 = tau_p.tau3 / dt;
                // written dt/(dt + rho tau) so tau -> 0 stays finite
                ratio1 = dt / (dt + rho * tau.tau1);
                ratio3 = dt / (dt + tau.tau3);
            } else {
                A1 = tau.tau1;
                A2 = tau.tau2;
                A3 = tau.tau3;
            }

            if (diag) {
                diag->tau1_min = std::min(diag->tau1_min, tau.tau1);
                diag->tau1_max = std::max(diag->tau1_max, tau.tau1);
                diag->tau2_min = std::min(diag->tau2_min, tau.tau2);
                diag->tau2_max = std::max(diag->tau2_max, tau.tau2);
                diag->tau3_min = std::min(diag->tau3_min, tau.tau3);
                diag->tau3_max = std::max(diag->tau3_max, tau.tau3);
                diag->max_vpair_coeff =
                    std::max(diag->max_vpair_coeff, std::max(W1, W3));
            }
        }

        A_loc.setZero();
        b_loc.setZero();

        for (int q = 0; q < nq; ++q) {
            const Eigen::Vector3d N =
                ReferenceElement::shape(quad.points(q, 0), quad.points(q, 1));
            const double w = quad.weights(q) * jac2;
            const Eigen::Vector2d xq = geo.coords.transpose() * N;

            // Fields at the quadrature point: advecting/viscosity values from
            // the lagged coefficient state, operands from the t^n state.
            Eigen::Vector2d adv(0.0, 0.0), un_q(0.0, 0.0);
            double c_q = 0.0, p_q = 0.0, c_lag_q = 0.0;
            for (int a = 0; a < 3; ++a) {
                adv(0) += N(a) * a1n[a];
                adv(1) += N(a) * a2n[a];
                un_q(0) += N(a) * u1n[a];
                un_q(1) += N(a) * u2n[a];
                c_q += N(a) * cn[a];
                p_q += N(a) * pn[a];
                c_lag_q += N(a) * cl[a];
            }

            const double mu_q = cs.viscosity(c_lag_q);
            const auto [D1, D2] = cs.diffusion(xq(0), xq(1), t_theta);
            const Eigen::Vector2d f_q = forcing.f(xq(0), xq(1), t_theta);
            const double g_q = forcing.g(xq(0), xq(1), t_theta);
            if (!std::isfinite(mu_q) || !std::isfinite(D1) || !std::isfinite(D2))
                throw std::runtime_error("assemble_step: NaN coefficient");

            const double adv_dot_G[3] = {adv.dot(G.row(0)), adv.dot(G.row(1)),
                                         adv.dot(G.row(2))};
            // (adv . grad) u^n, constant gradient times pointwise advection
            const Eigen::Vector2d conv_n = grad_un * adv;

            // ----- Galerkin terms -----
            for (int a = 0; a < 3; ++a) {
                const int iu1 = 4 * a, iu2 = 4 * a + 1, ip = 4 * a + 2,
                          ic = 4 * a + 3;
                for (int b = 0; b < 3; ++b) {
                    const int ju1 = 4 * b, ju2 = 4 * b + 1, jp = 4 * b + 2,
                              jc = 4 * b + 3;
                    const double mass = w * N(a) * N(b);
                    // convection (skew-symmetrized) + viscosity, same for both
                    // velocity components
                    const double conv =
                        w * (rho * adv_dot_G[b] * N(a) +
                             0.5 * rho * div_adv * N(b) * N(a));
                    const double visc = w * mu_q * G.row(a).dot(G.row(b));
                    const double vel = rho / dt * mass + beta_p * (conv + visc);
                    A_loc(iu1, ju1) += vel;
                    A_loc(iu2, ju2) += vel;
                    // -b(v, p) and +b(u, q)
                    A_loc(iu1, jp) += beta_p * (-w * G(a, 0) * N(b));
                    A_loc(iu2, jp) += beta_p * (-w * G(a, 1) * N(b));
                    A_loc(ip, ju1) += beta_p * (w * G(b, 0) * N(a));
                    A_loc(ip, ju2) += beta_p * (w * G(b, 1) * N(a));
                    A_loc(ip, jp) += kPressurePenalty * mass;
                    // transport: diffusion + advection + reaction
                    const double trans =
                        w * (D1 * G(a, 0) * G(b, 0) + D2 * G(a, 1) * G(b, 1)) +
                        w * N(a) * adv_dot_G[b] + w * alpha * N(a) * N(b);
                    A_loc(ic, jc) += mass / dt + beta_p * trans;
                }

                // Right-hand side: forcing, mass history, and the known
                // (1-theta)/2 part of the spatial operator.
                b_loc(iu1) +=
                    w * (f_q(0) * N(a) + rho / dt * un_q(0) * N(a) -
                         beta_m * (rho * conv_n(0) * N(a) +
                                   0.5 * rho * div_adv * un_q(0) * N(a) +
                                   mu_q * G.row(a).dot(grad_un.row(0)) -
                                   G(a, 0) * p_q));
                b_loc(iu2) +=
                    w * (f_q(1) * N(a) + rho / dt * un_q(1) * N(a) -
                         beta_m * (rho * conv_n(1) * N(a) +
                                   0.5 * rho * div_adv * un_q(1) * N(a) +
                                   mu_q * G.row(a).dot(grad_un.row(1)) -
                                   G(a, 1) * p_q));
                b_loc(ip) += -beta_m * w * N(a) * div_un;
                b_loc(ic) +=
                    w * (g_q * N(a) + c_q / dt * N(a) -
                         beta_m * (D1 * G(a, 0) * grad_cn(0) +
                                   D2 * G(a, 1) * grad_cn(1) +
                                   N(a) * adv.dot(grad_cn) +
                                   alpha * c_q * N(a)));
            }

            // ----- subgrid-scale terms -----
            if (asgs) {
                // Trial-side residual rows (coefficients of U^{n+1}); the
                // P1 Laplacian contributions are identically zero and dropped.
                for (int b = 0; b < 3; ++b) {
                    const double mom =
                        mass_on * rho * N(b) / dt + beta_p * rho * adv_dot_G[b];
                    r1x[4 * b + 0] = mom;
                    r1y[4 * b + 0] = 0.0;
                    r1x[4 * b + 1] = 0.0;
                    r1y[4 * b + 1] = mom;
                    r1x[4 * b + 2] = beta_p * G(b, 0);
                    r1y[4 * b + 2] = beta_p * G(b, 1);
                    r1x[4 * b + 3] = 0.0;
                    r1y[4 * b + 3] = 0.0;

                    r2[4 * b + 0] = beta_p * G(b, 0);
                    r2[4 * b + 1] = beta_p * G(b, 1);
                    r2[4 * b + 2] = 0.0;
                    r2[4 * b + 3] = 0.0;

                    r3[4 * b + 0] = 0.0;
                    r3[4 * b + 1] = 0.0;
                    r3[4 * b + 2] = 0.0;
                    r3[4 * b + 3] = mass_on * N(b) / dt +
                                    beta_p * (adv_dot_G[b] + alpha * N(b));
                }

                // Known residual values (U^n part and forcing).
                const Eigen::Vector2d R1known =
                    mass_on * (-rho / dt) * un_q +
                    beta_m * (rho * conv_n + grad_pn) - f_q;
                const double R2known = beta_m * div_un;
                const double R3known = mass_on * (-c_q / dt) +
                                       beta_m * (adv.dot(grad_cn) + alpha * c_q) -
                                       g_q;

                // Subscale history d = (M/dt) u~^n at this quadrature point.
                Eigen::Vector2d d1(0.0, 0.0);
                double d3 = 0.0;
                if (dynamic && subscale && !subscale->empty()) {
                    d1(0) = rho / dt * subscale->v1(k, q);
                    d1(1) = rho / dt * subscale->v2(k, q);
                    d3 = subscale->c(k, q) / dt;
                }

                // Test-side pairings: -L*(u^n; V) slots and plain V slots.
                for (int a = 0; a < 3; ++a) {
                    const double conv_a = rho * adv_dot_G[a];
                    q1x[4 * a + 0] = conv_a;
                    q1y[4 * a + 0] = 0.0;
                    q1x[4 * a + 1] = 0.0;
                    q1y[4 * a + 1] = conv_a;
                    q1x[4 * a + 2] = G(a, 0);
                    q1y[4 * a + 2] = G(a, 1);
                    q1x[4 * a + 3] = 0.0;
                    q1y[4 * a + 3] = 0.0;

                    q2[4 * a + 0] = G(a, 0);
                    q2[4 * a + 1] = G(a, 1);
                    q2[4 * a + 2] = 0.0;
                    q2[4 * a + 3] = 0.0;

                    q3[4 * a + 0] = 0.0;
                    q3[4 * a + 1] = 0.0;
                    q3[4 * a + 2] = 0.0;
                    q3[4 * a + 3] = adv_dot_G[a] - alpha * N(a);

                    v1x[4 * a + 0] = N(a);
                    v1y[4 * a + 0] = 0.0;
                    v1x[4 * a + 1] = 0.0;
                    v1y[4 * a + 1] = N(a);
                    v1x[4 * a + 2] = 0.0;
                    v1y[4 * a + 2] = 0.0;
                    v1x[4 * a + 3] = 0.0;
                    v1y[4 * a + 3] = 0.0;

                    v2[4 * a + 0] = 0.0;
                    v2[4 * a + 1] = 0.0;
                    v2[4 * a + 2] = N(a);
                    v2[4 * a + 3] = 0.0;

                    v3[4 * a + 0] = 0.0;
                    v3[4 * a + 1] = 0.0;
                    v3[4 * a + 2] = 0.0;
                    v3[4 * a + 3] = N(a);
                }

                for (int i = 0; i < 12; ++i) {
                    // matrix weights: tau'-weighted adjoint pairing minus the
                    // (M tau'/dt)-weighted plain pairing
                    const double wq1x = A1 * q1x[i] - W1 * v1x[i];
                    const double wq1y = A1 * q1y[i] - W1 * v1y[i];
                    const double wq2 = A2 * q2[i];  // zero-mass continuity row
                    const double wq3 = A3 * q3[i] - W3 * v3[i];
                    (void)v2;
                    for (int j = 0; j < 12; ++j) {
                        A_loc(i, j) += w * (r1x[j] * wq1x + r1y[j] * wq1y +
                                            r2[j] * wq2 + r3[j] * wq3);
                    }
                    // knowns: the same weights on the known residual parts,
                    // the history shift of the adjoint pairing, and the
                    // tau^{-1} tau' d term
                    b_loc(i) -=
                        w * (R1known(0) * wq1x + R1known(1) * wq1y +
                             R2known * wq2 + R3known * wq3 -
                             A1 * (d1(0) * q1x[i] + d1(1) * q1y[i]) -
                             A3 * d3 * q3[i] -
                             ratio1 * (d1(0) * v1x[i] + d1(1) * v1y[i]) -
                             ratio3 * d3 * v3[i]);
                }
            }
        }

        for (int a = 0; a < 3; ++a) {
            for (int ca = 0; ca < 4; ++ca) {
                const int gi = dof_index(nd[a], ca);
                rhs(gi) += b_loc(4 * a + ca);
                for (int b = 0; b < 3; ++b)
                    for (int cb = 0; cb < 4; ++cb)
                        trip.emplace_back(gi, dof_index(nd[b], cb),
                                          A_loc(4 * a + ca, 4 * b + cb));
            }
        }
    }

    SparseSystem sys;
    sys.matrix.resize(n_dofs, n_dofs);
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    sys.rhs = std::move(rhs);
    return sys;
}

void update_subscale_field(const StructuredTriMesh& mesh,
                           const QuadratureRule& quad,
                           const CoupledState& state_n,
                           const CoupledState& state_np1, double theta,
                           double dt, const CaseSetup& cs,
                           const Forcing& forcing, const StabConstants& stab,
                           SubscaleField& field) {
    const double rho = cs.params.rho;
    const double alpha = cs.params.alpha;
    const double bp = 0.5 * (1.0 + theta), bm = 0.5 * (1.0 - theta);
    const double t_theta = state_n.t + bp * dt;
    const int nq = quad.size();
    const bool keep_history = stab.truncation == 0;

    if (field.empty()) field = SubscaleField::zero(mesh.n_triangles(), nq);

    for (int k = 0; k < mesh.n_triangles(); ++k) {
        const ElementGeometry geo = element_geometry(mesh, k);
        const Eigen::Matrix<double, 3, 2> G = physical_gradients(geo.jacobian);

        int nd[3];
        double a1n[3], a2n[3], cl[3];
        double u1t[3], u2t[3], pt[3], ct[3], du1[3], du2[3], dc[3];
        for (int a = 0; a < 3; ++a) {
            nd[a] = mesh.triangles(k, a);
            a1n[a] = state_n.u1(nd[a]);
            a2n[a] = state_n.u2(nd[a]);
            cl[a] = state_n.c(nd[a]);
            u1t[a] = bp * state_np1.u1(nd[a]) + bm * state_n.u1(nd[a]);
            u2t[a] = bp * state_np1.u2(nd[a]) + bm * state_n.u2(nd[a]);
            pt[a] = bp * state_np1.p(nd[a]) + bm * state_n.p(nd[a]);
            ct[a] = bp * state_np1.c(nd[a]) + bm * state_n.c(nd[a]);
            du1[a] = (state_np1.u1(nd[a]) - state_n.u1(nd[a])) / dt;
            du2[a] = (state_np1.u2(nd[a]) - state_n.u2(nd[a])) / dt;
            dc[a] = (state_np1.c(nd[a]) - state_n.c(nd[a])) / dt;
        }

        Eigen::Matrix2d grad_u = Eigen::Matrix2d::Zero();
        Eigen::Vector2d grad_p(0, 0), grad_c(0, 0);
        for (int a = 0; a < 3; ++a) {
            grad_u.row(0) += u1t[a] * G.row(a);
            grad_u.row(1) += u2t[a] * G.row(a);
            grad_p += pt[a] * G.row(a).transpose();
            grad_c += ct[a] * G.row(a).transpose();
        }

        const TauTriple tau = element_tau(geo, quad, a1n, a2n, cl, cs, stab, t_theta);
        const TauTriple tp = dynamic_tau(tau, rho, dt, SubscaleMode::Dynamic);

        for (int q = 0; q < nq; ++q) {
            const Eigen::Vector3d N =
                ReferenceElement::shape(quad.points(q, 0), quad.points(q, 1));
            const Eigen::Vector2d xq = geo.coords.transpose() * N;

            Eigen::Vector2d adv(0, 0), dudt(0, 0);
            double cth = 0.0, dcdt = 0.0;
            for (int a = 0; a < 3; ++a) {
                adv(0) += N(a) * a1n[a];
                adv(1) += N(a) * a2n[a];
                dudt(0) += N(a) * du1[a];
                dudt(1) += N(a) * du2[a];
                cth += N(a) * ct[a];
                dcdt += N(a) * dc[a];
            }

            // residual of the solved step, with the same operator reductions
            // as the assembly (P1 Laplacians dropped, lagged advection)
            const Eigen::Vector2d r1 =
                forcing.f(xq(0), xq(1), t_theta) -
                (rho * dudt + rho * (grad_u * adv) + grad_p);
            const double r3 = forcing.g(xq(0), xq(1), t_theta) -
                              (dcdt + adv.dot(grad_c) + alpha * cth);

            field.v1(k, q) = tp.tau1 * r1(0) +
                             (keep_history ? rho * tp.tau1 / dt * field.v1(k, q) : 0.0);
            field.v2(k, q) = tp.tau1 * r1(1) +
                             (keep_history ? rho * tp.tau1 / dt * field.v2(k, q) : 0.0);
            field.c(k, q) = tp.tau3 * r3 +
                            (keep_history ? tp.tau3 / dt * field.c(k, q) : 0.0);
        }
    }
}

SpMat assemble_convection_block(const StructuredTriMesh& mesh,
                                const QuadratureRule& quad,
                                const Eigen::VectorXd& a1,
                                const Eigen::VectorXd& a2, double rho) {
    if (a1.size() != mesh.n_nodes() || a2.size() != mesh.n_nodes())
        throw std::invalid_argument("assemble_convection_block: field size mismatch");

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(mesh.n_triangles()) * 36);
    const int nq = quad.size();

    for (int k = 0; k < mesh.n_triangles(); ++k) {
        const ElementGeometry geo = element_geometry(mesh, k);
        const Eigen::Matrix<double, 3, 2> G = physical_gradients(geo.jacobian);
        const double jac2 = 2.0 * geo.area;

        int nd[3];
        double a1n[3], a2n[3];
        for (int a = 0; a < 3; ++a) {
            nd[a] = mesh.triangles(k, a);
            a1n[a] = a1(nd[a]);
            a2n[a] = a2(nd[a]);
        }
        double div_a = 0.0;
        for (int a = 0; a < 3; ++a)
            div_a += a1n[a] * G(a, 0) + a2n[a] * G(a, 1);

        for (int q = 0; q < nq; ++q) {
            const Eigen::Vector3d N =
                ReferenceElement::shape(quad.points(q, 0), quad.points(q, 1));
            const double w = quad.weights(q) * jac2;
            Eigen::Vector2d adv(0.0, 0.0);
            for (int a = 0; a < 3; ++a) {
                adv(0) += N(a) * a1n[a];
                adv(1) += N(a) * a2n[a];
            }
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    const double val = w * (rho * adv.dot(G.row(b)) * N(a) +
                                            0.5 * rho * div_a * N(b) * N(a));
                    trip.emplace_back(2 * nd[a], 2 * nd[b], val);
                    trip.emplace_back(2 * nd[a] + 1, 2 * nd[b] + 1, val);
                }
            }
        }
    }

    SpMat C(2 * mesh.n_nodes(), 2 * mesh.n_nodes());
    C.setFromTriplets(trip.begin(), trip.end());
    return C;
}

void apply_dirichlet(SparseSystem& system, const StructuredTriMesh& mesh,
                     int pressure_pin_node, double pressure_pin_value) {
    const int n_dofs = system.n_dofs();
    std::vector<char> constrained(n_dofs, 0);
    std::vector<double> value(n_dofs, 0.0);

    for (int b : mesh.boundary_nodes) {
        constrained[dof_index(b, 0)] = 1;
        constrained[dof_index(b, 1)] = 1;
        constrained[dof_index(b, 3)] = 1;
    }
    if (pressure_pin_node >= 0) {
        const int d = dof_index(pressure_pin_node, 2);
        constrained[d] = 1;
        value[d] = pressure_pin_value;
    }

    // Move eliminated-column contributions of nonzero constrained values
    // to the right-hand side.
    if (pressure_pin_node >= 0 && pressure_pin_value != 0.0) {
        const int col = dof_index(pressure_pin_node, 2);
        for (SpMat::InnerIterator it(system.matrix, col); it; ++it) {
            if (!constrained[it.row()])
                system.rhs(it.row()) -= it.value() * pressure_pin_value;
        }
    }

    for (int col = 0; col < system.matrix.outerSize(); ++col) {
        for (SpMat::InnerIterator it(system.matrix, col); it; ++it) {
            const int row = static_cast<int>(it.row());
            if (constrained[row] || constrained[col])
                it.valueRef() = (row == col && constrained[row]) ? 1.0 : 0.0;
        }
    }
    for (int d = 0; d < n_dofs; ++d)
        if (constrained[d]) system.rhs(d) = value[d];
}

}  // namespace nsadr
