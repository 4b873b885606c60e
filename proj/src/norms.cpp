#include "nsadr/norms.hpp"

#include <stdexcept>

#include "nsadr/mms.hpp"

namespace nsadr {

ExactFields ExactFields::manufactured() {
    ExactFields e;
    e.velocity = [](double x, double y, double t) { return mms::velocity(x, y, t); };
    e.velocity_gradient = [](double x, double y, double t) {
        return mms::velocity_gradient(x, y, t);
    };
    e.pressure = [](double x, double y, double t) { return mms::pressure(x, y, t); };
    e.concentration = [](double x, double y, double t) {
        return mms::concentration(x, y, t);
    };
    e.concentration_gradient = [](double x, double y, double t) {
        return mms::concentration_gradient(x, y, t);
    };
    return e;
}

ErrorAccumulator::ErrorAccumulator(const StructuredTriMesh& mesh,
                                   const QuadratureRule& quad, ExactFields exact)
    : mesh_(mesh), quad_(quad), exact_(std::move(exact)) {}

void ErrorAccumulator::start(const CoupledState& s0) { endpoint(s0); }

void ErrorAccumulator::endpoint(const CoupledState& s) {
    const double t = s.t;
    double u_l2 = 0.0, c_l2 = 0.0;
    for (int k = 0; k < mesh_.n_triangles(); ++k) {
        const ElementGeometry geo = element_geometry(mesh_, k);
        const double jac2 = 2.0 * geo.area;
        int nd[3];
        for (int a = 0; a < 3; ++a) nd[a] = mesh_.triangles(k, a);
        for (int q = 0; q < quad_.size(); ++q) {
            const Eigen::Vector3d N =
                ReferenceElement::shape(quad_.points(q, 0), quad_.points(q, 1));
            const double w = quad_.weights(q) * jac2;
            const Eigen::Vector2d xq = geo.coords.transpose() * N;
            Eigen::Vector2d uh(0.0, 0.0);
            double ch = 0.0;
            for (int a = 0; a < 3; ++a) {
                uh(0) += N(a) * s.u1(nd[a]);
                uh(1) += N(a) * s.u2(nd[a]);
                ch += N(a) * s.c(nd[a]);
            }
            const Eigen::Vector2d eu = exact_.velocity(xq(0), xq(1), t) - uh;
            const double ec = exact_.concentration(xq(0), xq(1), t) - ch;
            u_l2 += w * eu.squaredNorm();
            c_l2 += w * ec * ec;
        }
    }
    rep_.u_max_l2 = std::max(rep_.u_max_l2, u_l2);
    rep_.c_max_l2 = std::max(rep_.c_max_l2, c_l2);
}

void ErrorAccumulator::add_interval(const CoupledState& sn,
                                    const CoupledState& snp1, double theta,
                                    double dt) {
    const double bp = 0.5 * (1.0 + theta);
    const double bm = 0.5 * (1.0 - theta);
    const double t_eval = sn.t + bp * dt;

    for (int k = 0; k < mesh_.n_triangles(); ++k) {
        const ElementGeometry geo = element_geometry(mesh_, k);
        const Eigen::Matrix<double, 3, 2> G = physical_gradients(geo.jacobian);
        const double jac2 = 2.0 * geo.area;

        int nd[3];
        double u1t[3], u2t[3], pt[3], ct[3];
        for (int a = 0; a < 3; ++a) {
            nd[a] = mesh_.triangles(k, a);
            u1t[a] = bp * snp1.u1(nd[a]) + bm * sn.u1(nd[a]);
            u2t[a] = bp * snp1.u2(nd[a]) + bm * sn.u2(nd[a]);
            pt[a] = bp * snp1.p(nd[a]) + bm * sn.p(nd[a]);
            ct[a] = bp * snp1.c(nd[a]) + bm * sn.c(nd[a]);
        }

        // Constant discrete gradients on the element.
        Eigen::Matrix2d grad_uh;
        grad_uh.setZero();
        Eigen::Vector2d grad_ch = Eigen::Vector2d::Zero();
        for (int a = 0; a < 3; ++a) {
            grad_uh.row(0) += u1t[a] * G.row(a);
            grad_uh.row(1) += u2t[a] * G.row(a);
            grad_ch += ct[a] * G.row(a).transpose();
        }

        for (int q = 0; q < quad_.size(); ++q) {
            const Eigen::Vector3d N =
                ReferenceElement::shape(quad_.points(q, 0), quad_.points(q, 1));
            const double w = quad_.weights(q) * jac2;
            const Eigen::Vector2d xq = geo.coords.transpose() * N;

            Eigen::Vector2d uh(0.0, 0.0);
            double ph = 0.0, ch = 0.0;
            for (int a = 0; a < 3; ++a) {
                uh(0) += N(a) * u1t[a];
                uh(1) += N(a) * u2t[a];
                ph += N(a) * pt[a];
                ch += N(a) * ct[a];
            }

            const Eigen::Vector2d eu =
                exact_.velocity(xq(0), xq(1), t_eval) - uh;
            const Eigen::Matrix2d egu =
                exact_.velocity_gradient(xq(0), xq(1), t_eval) - grad_uh;
            const double ep = exact_.pressure(xq(0), xq(1), t_eval) - ph;
            const double ec = exact_.concentration(xq(0), xq(1), t_eval) - ch;
            const Eigen::Vector2d egc =
                exact_.concentration_gradient(xq(0), xq(1), t_eval) - grad_ch;

            rep_.p_l2l2 += dt * w * ep * ep;
            rep_.u_l2h1 += dt * w * (eu.squaredNorm() + egu.squaredNorm());
            rep_.c_l2h1 += dt * w * (ec * ec + egc.squaredNorm());
        }
    }

    endpoint(snp1);
}

double rate_of_convergence(double err_coarse, double err_fine) {
    if (err_coarse <= 0.0 || err_fine <= 0.0)
        throw std::invalid_argument("rate_of_convergence: errors must be > 0");
    return std::log2(err_coarse / err_fine);
}

}  // namespace nsadr
