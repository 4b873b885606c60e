#include "nsadr/time_stepper.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <stdexcept>

#include "nsadr/mms.hpp"

namespace nsadr {

SchemeConfig SchemeConfig::make(double theta, double dt, double T) {
    if (theta != 0.0 && theta != 1.0)
        throw std::invalid_argument("SchemeConfig: theta must be 0 or 1");
    if (dt <= 0.0 || T <= 0.0)
        throw std::invalid_argument("SchemeConfig: dt and T must be > 0");
    SchemeConfig s;
    s.theta = theta;
    s.dt = dt;
    s.T = T;
    s.n_steps = static_cast<int>(std::lround(T / dt));
    if (s.n_steps < 1 || std::abs(s.n_steps * dt - T) > 1e-12 * std::max(1.0, T))
        throw std::invalid_argument("SchemeConfig: T must be a multiple of dt");
    return s;
}

namespace {

// L2 projection of a scalar field onto the P1 space with zero boundary
// values: boundary rows of the mass matrix become identity rows.
Eigen::VectorXd project_zero_boundary(
    const StructuredTriMesh& mesh, const QuadratureRule& quad,
    const std::function<double(double, double)>& field) {
    const int n = mesh.n_nodes();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(mesh.n_triangles()) * 9 + n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

    for (int k = 0; k < mesh.n_triangles(); ++k) {
        const ElementGeometry geo = element_geometry(mesh, k);
        const double jac2 = 2.0 * geo.area;
        int nd[3];
        for (int a = 0; a < 3; ++a) nd[a] = mesh.triangles(k, a);
        for (int q = 0; q < quad.size(); ++q) {
            const Eigen::Vector3d N =
                ReferenceElement::shape(quad.points(q, 0), quad.points(q, 1));
            const double w = quad.weights(q) * jac2;
            const Eigen::Vector2d xq = geo.coords.transpose() * N;
            const double fq = field(xq(0), xq(1));
            for (int a = 0; a < 3; ++a) {
                if (mesh.is_boundary[nd[a]]) continue;
                rhs(nd[a]) += w * fq * N(a);
                for (int b = 0; b < 3; ++b) {
                    if (mesh.is_boundary[nd[b]]) continue;
                    trip.emplace_back(nd[a], nd[b], w * N(a) * N(b));
                }
            }
        }
    }
    for (int i : mesh.boundary_nodes) trip.emplace_back(i, i, 1.0);

    SpMat M(n, n);
    M.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SpMat> chol(M);
    if (chol.info() != Eigen::Success)
        throw std::runtime_error("initialize: mass matrix factorization failed");
    Eigen::VectorXd x = chol.solve(rhs);
    for (int i : mesh.boundary_nodes) x(i) = 0.0;
    return x;
}

}  // namespace

CoupledState initialize(const StructuredTriMesh& mesh, const QuadratureRule& quad,
                        const std::function<double(double, double)>& u1_0,
                        const std::function<double(double, double)>& u2_0,
                        const std::function<double(double, double)>& c_0,
                        const std::function<double(double, double)>& p_0) {
    CoupledState s = CoupledState::zero(mesh.n_nodes(), 0.0);
    s.u1 = project_zero_boundary(mesh, quad, u1_0);
    s.u2 = project_zero_boundary(mesh, quad, u2_0);
    s.c = project_zero_boundary(mesh, quad, c_0);
    for (int i = 0; i < mesh.n_nodes(); ++i)
        s.p(i) = p_0(mesh.nodes(i, 0), mesh.nodes(i, 1));
    return s;
}

CoupledState initialize_manufactured(const StructuredTriMesh& mesh,
                                     const QuadratureRule& quad) {
    return initialize(
        mesh, quad,
        [](double x, double y) { return mms::velocity(x, y, 0.0)(0); },
        [](double x, double y) { return mms::velocity(x, y, 0.0)(1); },
        [](double x, double y) { return mms::concentration(x, y, 0.0); },
        [](double x, double y) { return mms::pressure(x, y, 0.0); });
}

CoupledState step(const StructuredTriMesh& mesh, const QuadratureRule& quad,
                  const CoupledState& state_n, const SchemeConfig& scheme,
                  const CaseSetup& cs, const Forcing& forcing, Method method,
                  const StabConstants& stab, LinearSolver& solver,
                  double pressure_pin_value, int picard_iters,
                  StepDiagnostics* diag, SubscaleField* subscale) {
    const double dt = scheme.dt;
    const double theta = scheme.theta;
    const bool pin = solver.config().pressure_fix == PressureFix::PinNode;

    CoupledState next = state_n;
    CoupledState coeff = state_n;  // Picard iterate; first pass is the plain scheme

    for (int it = 0; it <= picard_iters; ++it) {
        AssemblyDiagnostics adiag;
        SparseSystem sys =
            assemble_step(mesh, quad, state_n, dt, theta, cs, forcing, method,
                          stab, diag ? &adiag : nullptr,
                          it == 0 ? nullptr : &coeff, subscale);
        apply_dirichlet(sys, mesh, pin ? 0 : -1, pressure_pin_value);

        Eigen::VectorXd x;
        const SolveReport rep = solver.solve(sys.matrix, sys.rhs, x);
        if (!x.allFinite())
            throw std::runtime_error("step: non-finite solution");

        for (int i = 0; i < mesh.n_nodes(); ++i) {
            next.u1(i) = x(dof_index(i, 0));
            next.u2(i) = x(dof_index(i, 1));
            next.p(i) = x(dof_index(i, 2));
            next.c(i) = x(dof_index(i, 3));
        }
        if (diag) {
            diag->solve = rep;
            diag->assembly = adiag;
        }

        if (it < picard_iters) {
            // Coefficients for the next sweep come from the theta-combination.
            const double bp = 0.5 * (1.0 + theta), bm = 0.5 * (1.0 - theta);
            coeff.u1 = bp * next.u1 + bm * state_n.u1;
            coeff.u2 = bp * next.u2 + bm * state_n.u2;
            coeff.c = bp * next.c + bm * state_n.c;
        }
    }

    for (int b : mesh.boundary_nodes) {
        next.u1(b) = 0.0;
        next.u2(b) = 0.0;
        next.c(b) = 0.0;
    }
    fix_pressure_nullspace(mesh, next.p);
    next.t = state_n.t + dt;

    if (subscale && method == Method::ASGS && stab.mode == SubscaleMode::Dynamic)
        update_subscale_field(mesh, quad, state_n, next, theta, dt, cs, forcing,
                              stab, *subscale);
    return next;
}

namespace {

// Subscale history at element centroids from the actual post-solve residual;
// used to confirm the pressure slot stays empty.
double max_abs_d2_field(const StructuredTriMesh& mesh,
                        const CoupledState& state_n,
                        const CoupledState& state_np1, double theta, double dt,
                        const CaseSetup& cs, const Forcing& forcing,
                        const StabConstants& stab) {
    const double rho = cs.params.rho;
    const double alpha = cs.params.alpha;
    const double bp = 0.5 * (1.0 + theta), bm = 0.5 * (1.0 - theta);
    const double t_theta = state_n.t + bp * dt;
    double worst = 0.0;

    for (int k = 0; k < mesh.n_triangles(); ++k) {
        const ElementGeometry geo = element_geometry(mesh, k);
        const Eigen::Matrix<double, 3, 2> G = physical_gradients(geo.jacobian);
        int nd[3];
        for (int a = 0; a < 3; ++a) nd[a] = mesh.triangles(k, a);

        Eigen::Vector2d adv(0, 0), uth(0, 0), dudt(0, 0), grad_p(0, 0), grad_c(0, 0);
        Eigen::Matrix2d grad_u = Eigen::Matrix2d::Zero();
        double cth = 0.0, dcdt = 0.0, cn = 0.0;
        Eigen::Vector2d xc(0, 0);
        for (int a = 0; a < 3; ++a) {
            const double u1t = bp * state_np1.u1(nd[a]) + bm * state_n.u1(nd[a]);
            const double u2t = bp * state_np1.u2(nd[a]) + bm * state_n.u2(nd[a]);
            const double pt = bp * state_np1.p(nd[a]) + bm * state_n.p(nd[a]);
            const double ct = bp * state_np1.c(nd[a]) + bm * state_n.c(nd[a]);
            uth += Eigen::Vector2d(u1t, u2t) / 3.0;
            adv += Eigen::Vector2d(state_n.u1(nd[a]), state_n.u2(nd[a])) / 3.0;
            dudt += Eigen::Vector2d(state_np1.u1(nd[a]) - state_n.u1(nd[a]),
                                    state_np1.u2(nd[a]) - state_n.u2(nd[a])) /
                    (3.0 * dt);
            cth += ct / 3.0;
            dcdt += (state_np1.c(nd[a]) - state_n.c(nd[a])) / (3.0 * dt);
            cn += state_n.c(nd[a]) / 3.0;
            grad_u.row(0) += u1t * G.row(a);
            grad_u.row(1) += u2t * G.row(a);
            grad_p += pt * G.row(a).transpose();
            grad_c += ct * G.row(a).transpose();
            xc += mesh.nodes.row(nd[a]).transpose() / 3.0;
        }

        const Eigen::Vector2d r_mom =
            forcing.f(xc(0), xc(1), t_theta) -
            (rho * dudt + rho * (grad_u * adv) + grad_p);
        const double r_trn = forcing.g(xc(0), xc(1), t_theta) -
                             (dcdt + adv.dot(grad_c) + alpha * cth);

        const auto [d1, d2] = cs.diffusion(xc(0), xc(1), t_theta);
        const TauTriple tau = compute_tau(geo.h_k, cs.viscosity(cn), adv.norm(),
                                          std::max(d1, d2), alpha, rho, stab);
        const TauTriple tp = dynamic_tau(tau, rho, dt, stab.mode);
        const SubscaleVector d = subscale_history(r_mom, r_trn, tp, rho, dt,
                                                  stab.mode, stab.truncation);
        worst = std::max(worst, std::abs(d.d2));
    }
    return worst;
}

}  // namespace

RunResult run(const StructuredTriMesh& mesh, const QuadratureRule& quad,
              const CaseSetup& cs, const Forcing& forcing,
              const RunOptions& opts) {
    RunResult out;
    LinearSolver solver(opts.solver);
    CoupledState state = initialize_manufactured(mesh, quad);

    ErrorAccumulator acc(mesh, quad, ExactFields::manufactured());
    if (opts.with_norms) acc.start(state);
    if (opts.store_trajectory) out.trajectory.push_back(state);

    const bool dynamic_subscales =
        opts.method == Method::ASGS && opts.stab.mode == SubscaleMode::Dynamic;
    SubscaleField subscale;
    if (dynamic_subscales)
        subscale = SubscaleField::zero(mesh.n_triangles(), quad.size());

    const int N = opts.scheme.n_steps;
    for (int n = 0; n < N; ++n) {
        const double t_np1 = (n + 1) * opts.scheme.dt;
        const double pin_value = opts.pin_value ? opts.pin_value(t_np1) : 0.0;

        StepDiagnostics sdiag;
        CoupledState next =
            step(mesh, quad, state, opts.scheme, cs, forcing, opts.method,
                 opts.stab, solver, pin_value, opts.picard_iters, &sdiag,
                 dynamic_subscales ? &subscale : nullptr);

        out.total_iterations += sdiag.solve.iterations;
        out.any_direct_fallback |= sdiag.solve.used_direct_fallback;

        if (opts.with_norms)
            acc.add_interval(state, next, opts.scheme.theta, opts.scheme.dt);
        if (opts.method == Method::ASGS && opts.stab.mode == SubscaleMode::Dynamic)
            out.max_abs_d2 = std::max(
                out.max_abs_d2,
                max_abs_d2_field(mesh, state, next, opts.scheme.theta,
                                 opts.scheme.dt, cs, forcing, opts.stab));
        if (opts.with_estimator && n == N - 1) {
            out.residuals = compute_residuals(mesh, quad, state, next,
                                              opts.scheme.theta, opts.scheme.dt,
                                              cs, forcing, opts.estimator_advection);
            out.eta = out.residuals.eta;
        }

        state = std::move(next);
        if (opts.store_trajectory) out.trajectory.push_back(state);
    }

    out.errors = acc.report();
    out.final_state = std::move(state);
    out.steps = N;
    return out;
}

}  // namespace nsadr
