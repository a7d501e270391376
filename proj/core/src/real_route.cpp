#include "linfest/real_route.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "linfest/error.hpp"
#include "linfest/stencil.hpp"

namespace linfest::lab {

using geom::RMat;

double unit_ball_volume(int dim) {
    if (dim < 1) throw ParameterError("dimension must be positive");
    return std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
}

namespace {

void require_ball(const geom::ScalarField& psi) {
    if (!psi.mesh || psi.mesh->is_torus()) throw ParameterError("expected a field on a ball mesh");
}

double min_real_eigenvalue(const RMat& H) {
    return Eigen::SelfAdjointEigenSolver<RMat>(H, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

}  // namespace

AbpResult abp_check(const geom::ScalarField& psi, double r0, double mass_tol) {
    require_ball(psi);
    if (!(r0 > 0.0)) throw ParameterError("r0 must be positive");
    const geom::Mesh& m = *psi.mesh;
    const int d = m.dim();
    const double h = m.spacing();
    RMat H;
    long double mass = 0.0L;
    double depth = 0.0, grad = 0.0;
    std::vector<double> x(d);
    for (std::int64_t i : m.interior()) {
        const geom::NodeStencil s = geom::node_stencil(m, i);
        geom::real_hessian(s, psi.data.data(), h, H);
        const double scale = H.diagonal().cwiseAbs().maxCoeff();
        if (min_real_eigenvalue(H) < -1e-8 * std::max(1.0, scale))
            throw PreconditionError("psi is not convex at node " + std::to_string(i));
        mass += std::max(H.determinant(), 0.0);
        depth = std::max(depth, -psi[i]);
        m.coordinates(i, x.data());
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) r2 += (x[a] - m.center()[a]) * (x[a] - m.center()[a]);
        if (r2 > r0 * r0) continue;
        double g2 = 0.0;
        for (int a = 0; a < d; ++a) {
            const double g = (psi[s.plus[a]] - psi[s.minus[a]]) / (2.0 * h);
            g2 += g * g;
        }
        grad = std::max(grad, std::sqrt(g2));
    }
    AbpResult r;
    r.mass = static_cast<double>(mass) * std::pow(h, d);
    if (std::abs(r.mass - 1.0) > mass_tol)
        throw PreconditionError("real Monge-Ampere mass " + std::to_string(r.mass) + " is not 1");
    const double beta = unit_ball_volume(d);
    r.depth = depth;
    r.max_gradient = grad;
    r.depth_residual = depth - 4.0 * r0 / beta;
    r.gradient_residual = grad - 4.0 / beta;
    return r;
}

double blocki_gap(const RMat& H) {
    const int n = static_cast<int>(H.rows()) / 2;
    const double lhs = geom::complex_hessian(H).determinant().real();
    return lhs - std::ldexp(std::sqrt(std::max(H.determinant(), 0.0)), -n);
}

double hessian_det_comparison(const geom::ScalarField& psi, double convexity_slack) {
    require_ball(psi);
    const geom::Mesh& m = *psi.mesh;
    RMat H;
    double worst = std::numeric_limits<double>::infinity();
    for (std::int64_t i : m.interior()) {
        geom::real_hessian(geom::node_stencil(m, i), psi.data.data(), m.spacing(), H);
        const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
        if (min_real_eigenvalue(H) < -convexity_slack * scale)
            throw PreconditionError("psi is not convex at node " + std::to_string(i));
        worst = std::min(worst, blocki_gap(H));
    }
    return worst;
}

}  // namespace linfest::lab
