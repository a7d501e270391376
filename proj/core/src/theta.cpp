#include "linfest/theta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "linfest/error.hpp"

namespace linfest::lab {

using geom::HMat;

ThetaPoint theta_point(const cone::OperatorSpec& op, std::span<const double> lambda, const HMat& g) {
    const int n = op.n;
    if (n < 2) throw ParameterError("Theta needs n >= 2");
    if (static_cast<int>(lambda.size()) != n || g.rows() != n) throw ParameterError("dimension mismatch");
    if (!cone::in_cone(lambda, op.cone)) throw ConeError("lambda outside the operator cone");
    Eigen::LLT<HMat> llt(g);
    if (llt.info() != Eigen::Success) throw DomainError("metric is not positive definite");
    const double f = cone::f_value(op, lambda);
    const cone::EigenTuple df = cone::f_gradient(op, lambda);
    HMat L = llt.matrixL();
    HMat V = L.adjoint().triangularView<Eigen::Upper>().solve(HMat::Identity(n, n));
    std::vector<double> mu(n);
    double trace = 0.0;
    for (int i = 0; i < n; ++i) {
        mu[i] = df[i] / f;
        trace += mu[i];
    }
    HMat G = HMat::Zero(n, n);
    for (int i = 0; i < n; ++i) G += mu[i] * V.col(i) * V.col(i).adjoint();
    const HMat ginv = V * V.adjoint();
    ThetaPoint p;
    p.theta = (trace * ginv - G) / double(n - 1);
    p.theta = 0.5 * (p.theta + p.theta.adjoint()).eval();
    double prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= (trace - mu[i]) / (n - 1);
    const double detg = g.determinant().real();
    p.det = prod / detg;
    p.bound = op.gamma / (std::pow(f, n) * detg);
    p.residual = p.det - p.bound;
    double scaled = 1.0;
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int k = 0; k < n; ++k)
            if (k != i) sum += df[k];
        scaled *= sum / (n - 1);
    }
    p.scaled_residual = scaled - op.gamma;
    Eigen::SelfAdjointEigenSolver<HMat> es(p.theta, Eigen::EigenvaluesOnly);
    p.min_eigenvalue = es.eigenvalues()(0);
    return p;
}

ThetaResult theta_tensor(const cone::OperatorSpec& op, const geom::EigenField& lambda,
                         const geom::HermitianField& omega, const geom::ScalarField& F) {
    if (op.n < 2) throw ParameterError("Theta needs n >= 2");
    const geom::MeshPtr& mesh = omega.mesh();
    if (lambda.n != op.n || !lambda.mesh->same_as(*mesh) || !F.mesh->same_as(*mesh))
        throw ParameterError("fields do not match the operator");
    ThetaResult r;
    r.theta = geom::HermitianField(mesh, false);
    r.residual = std::numeric_limits<double>::infinity();
    r.min_eigenvalue = std::numeric_limits<double>::infinity();
    r.scaled_residual = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < mesh->size(); ++i) {
        if (!mesh->is_torus() && mesh->kind(i) != geom::NodeKind::Interior) continue;
        std::span<const double> lam(lambda.at(i), op.n);
        const ThetaPoint p = theta_point(op, lam, omega.at(i));
        r.theta.set(i, p.theta);
        r.residual = std::min(r.residual, p.residual);
        r.scaled_residual = std::min(r.scaled_residual, p.scaled_residual);
        r.min_eigenvalue = std::min(r.min_eigenvalue, p.min_eigenvalue);
        r.F_mismatch = std::max(r.F_mismatch, std::abs(F[i] - std::log(cone::f_value(op, lam))));
    }
    return r;
}

}  // namespace linfest::lab
