#include "nsadr/estimator.hpp"

#include <cmath>

#include "nsadr/mms.hpp"

namespace nsadr {

ResidualField compute_residuals(const StructuredTriMesh& mesh,
                                const QuadratureRule& quad,
                                const CoupledState& state_n,
                                const CoupledState& state_np1, double theta,
                                double dt, const CaseSetup& cs,
                                const Forcing& forcing, EstimatorAdvection adv) {
    const double rho = cs.params.rho;
    const double alpha = cs.params.alpha;
    const double bp = 0.5 * (1.0 + theta);
    const double bm = 0.5 * (1.0 - theta);
    const double t_theta = state_n.t + bp * dt;

    ResidualField res;
    const int nel = mesh.n_triangles();
    res.r1.resize(nel);
    res.r2.resize(nel);
    res.r3.resize(nel);

    double eta2 = 0.0, r1t = 0.0, r2t = 0.0, r3t = 0.0;

    for (int k = 0; k < nel; ++k) {
        const ElementGeometry geo = element_geometry(mesh, k);
        const Eigen::Matrix<double, 3, 2> G = physical_gradients(geo.jacobian);
        const double jac2 = 2.0 * geo.area;

        int nd[3];
        double u1t[3], u2t[3], pt[3], ct[3], du1[3], du2[3], dc[3];
        for (int a = 0; a < 3; ++a) {
            nd[a] = mesh.triangles(k, a);
            u1t[a] = bp * state_np1.u1(nd[a]) + bm * state_n.u1(nd[a]);
            u2t[a] = bp * state_np1.u2(nd[a]) + bm * state_n.u2(nd[a]);
            pt[a] = bp * state_np1.p(nd[a]) + bm * state_n.p(nd[a]);
            ct[a] = bp * state_np1.c(nd[a]) + bm * state_n.c(nd[a]);
            du1[a] = (state_np1.u1(nd[a]) - state_n.u1(nd[a])) / dt;
            du2[a] = (state_np1.u2(nd[a]) - state_n.u2(nd[a])) / dt;
            dc[a] = (state_np1.c(nd[a]) - state_n.c(nd[a])) / dt;
        }

        Eigen::Matrix2d grad_u;
        grad_u.setZero();
        Eigen::Vector2d grad_p = Eigen::Vector2d::Zero();
        Eigen::Vector2d grad_c = Eigen::Vector2d::Zero();
        for (int a = 0; a < 3; ++a) {
            grad_u.row(0) += u1t[a] * G.row(a);
            grad_u.row(1) += u2t[a] * G.row(a);
            grad_p += pt[a] * G.row(a).transpose();
            grad_c += ct[a] * G.row(a).transpose();
        }
        const double div_u = grad_u(0, 0) + grad_u(1, 1);

        double s1 = 0.0, s2 = 0.0, s3 = 0.0;
        for (int q = 0; q < quad.size(); ++q) {
            const Eigen::Vector3d N =
                ReferenceElement::shape(quad.points(q, 0), quad.points(q, 1));
            const double w = quad.weights(q) * jac2;
            const Eigen::Vector2d xq = geo.coords.transpose() * N;

            Eigen::Vector2d uh(0.0, 0.0), dudt(0.0, 0.0);
            double ch = 0.0, dcdt = 0.0;
            for (int a = 0; a < 3; ++a) {
                uh(0) += N(a) * u1t[a];
                uh(1) += N(a) * u2t[a];
                dudt(0) += N(a) * du1[a];
                dudt(1) += N(a) * du2[a];
                ch += N(a) * ct[a];
                dcdt += N(a) * dc[a];
            }

            const Eigen::Vector2d r1 =
                forcing.f(xq(0), xq(1), t_theta) -
                (rho * dudt + rho * (grad_u * uh) + grad_p);

            const double r2 = -div_u;

            const Eigen::Vector2d a3 =
                (adv == EstimatorAdvection::Exact)
                    ? mms::velocity(xq(0), xq(1), t_theta)
                    : uh;
            const double diff_div =
                cs.diffusion.d1_dx(xq(0), xq(1), t_theta) * grad_c(0) +
                cs.diffusion.d2_dy(xq(0), xq(1), t_theta) * grad_c(1);
            const double r3 =
                forcing.g(xq(0), xq(1), t_theta) -
                (dcdt - diff_div + a3.dot(grad_c) + alpha * ch);

            s1 += w * r1.squaredNorm();
            s2 += w * r2 * r2;
            s3 += w * r3 * r3;
        }

        res.r1(k) = std::sqrt(s1);
        res.r2(k) = std::sqrt(s2);
        res.r3(k) = std::sqrt(s3);
        r1t += s1;
        r2t += s2;
        r3t += s3;
        eta2 += geo.h_k * geo.h_k * (s1 + s2 + s3);
    }

    res.r1_total = std::sqrt(r1t);
    res.r2_total = std::sqrt(r2t);
    res.r3_total = std::sqrt(r3t);
    res.eta = std::sqrt(eta2);
    return res;
}

}  // namespace nsadr
