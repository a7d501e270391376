#include <cmath>

#include "doctest.h"
#include "linfest/ball_multigrid.hpp"
#include "linfest/dirichlet_solver.hpp"
#include "linfest/error.hpp"
#include "linfest/hermitian_ops.hpp"
#include "linfest/krylov.hpp"
#include "linfest/periodic_solver.hpp"
#include "oracles.hpp"

using namespace linfest;
using namespace linfest::geom;

namespace {

double radial_error(const ScalarField& psi, double a, double R, double* scale) {
    const Mesh& mesh = *psi.mesh;
    std::vector<double> x(mesh.dim());
    double err = 0.0, mx = 0.0;
    for (auto i : mesh.interior()) {
        mesh.coordinates(i, x.data());
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        const double ex = oracle::radial_cma(a, R, r2);
        err = std::max(err, std::abs(psi[i] - ex));
        mx = std::max(mx, std::abs(ex));
    }
    if (scale) *scale = mx;
    return err;
}

}  // namespace

TEST_CASE("bicgstab solves a diagonal system") {
    const int n = 50;
    pde::Vec d(n), b(n), x = pde::Vec::Zero(n);
    for (int i = 0; i < n; ++i) {
        d[i] = 1.0 + i;
        b[i] = std::sin(i + 1.0);
    }
    pde::LinearOperator A(n, [&](const pde::Vec& v, pde::Vec& y) { y = d.cwiseProduct(v); });
    auto r = pde::bicgstab(A, [&](const pde::Vec& v, pde::Vec& y) { y = v.cwiseQuotient(d); }, b, x, 1e-12, 100);
    CHECK(r.converged);
    CHECK((d.cwiseProduct(x) - b).norm() < 1e-10);
}

TEST_CASE("periodic solver recovers a separable discrete solution") {
    // lambda_j = 1 + (1/4) D_xx phi along x_j, exact for the three-point difference of a cosine
    const int m = 16;
    auto mesh = Mesh::torus(2, m, 1.0);
    const double h = mesh->spacing();
    const double kappa = (2.0 - 2.0 * std::cos(2 * M_PI * h)) / (h * h);
    const double c1 = 0.02, c2 = -0.015;
    auto phi_ex = ScalarField::from_function(mesh, [&](const double* x) {
        return c1 * std::cos(2 * M_PI * x[0]) + c2 * std::cos(2 * M_PI * x[2]);
    });
    auto F = ScalarField::from_function(mesh, [&](const double* x) {
        const double l1 = 1.0 - 0.25 * c1 * kappa * std::cos(2 * M_PI * x[0]);
        const double l2 = 1.0 - 0.25 * c2 * kappa * std::cos(2 * M_PI * x[2]);
        return std::log(std::sqrt(l1 * l2));
    });
    auto omega = HermitianField::identity(mesh);
    auto op = cone::OperatorSpec::monge_ampere(2);
    auto rep = pde::solve_periodic_fnl(op, omega, F, 1e-11);
    CHECK(rep.converged);
    CHECK(std::abs(rep.b_constant) < 1e-9);
    auto ref = sup_normalize(phi_ex);
    double err = 0.0;
    for (std::int64_t i = 0; i < mesh->size(); ++i) err = std::max(err, std::abs(rep.solution[i] - ref[i]));
    CHECK(err < 1e-9);
    int viol = -1;
    CHECK(pde::periodic_residual(op, omega, F, rep.solution, rep.b_constant, &viol) < 1e-9);
    CHECK(viol == 0);
}

TEST_CASE("periodic solver with zero forcing returns zero") {
    auto mesh = Mesh::torus(1, 16);
    auto rep = pde::solve_periodic_fnl(cone::OperatorSpec::monge_ampere(1), HermitianField::identity(mesh),
                                       ScalarField(mesh, 0.0), 1e-10);
    CHECK(rep.converged);
    for (double v : rep.solution.data) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("Dirichlet complex Monge-Ampere on a disc") {
    const double R = 1.0, a = 1.5;
    for (int m : {16, 32}) {
        auto mesh = Mesh::ball(1, m, R);
        pde::DirichletProblem prob(ScalarField(mesh, a));
        auto rep = pde::solve_dirichlet_cma(prob, 1e-10);
        CHECK(rep.converged);
        double scale = 0.0;
        const double err = radial_error(rep.solution, a, R, &scale);
        CHECK(err / scale < 0.05);
        CHECK(pde::dirichlet_residual(prob, rep.solution, false) < 1e-8);
        CHECK(rep.min_eigenvalue > 0.0);
    }
}

TEST_CASE("Dirichlet real Monge-Ampere on a disc") {
    const double R = 1.0, a = 0.75;
    auto mesh = Mesh::ball(1, 32, R);
    pde::DirichletProblem prob(ScalarField(mesh, std::pow(2 * a, 2)));
    auto rep = pde::solve_dirichlet_rma(prob, 1e-10);
    CHECK(rep.converged);
    double scale = 0.0;
    CHECK(radial_error(rep.solution, a, R, &scale) / scale < 0.05);
    CHECK(pde::dirichlet_residual(prob, rep.solution, true) < 1e-8);
}

TEST_CASE("linear Dirichlet solve") {
    const double R = 1.0;
    auto mesh = Mesh::ball(2, 16, R);
    auto u = pde::solve_dirichlet_linear(HermitianField::identity(mesh), 3.0, mesh, 1e-10);
    double scale = 0.0;
    // tr(i ddbar u) = 3 with u = 1.5 (|z|^2 - R^2)
    CHECK(radial_error(u, 1.5, R, &scale) / scale < 0.05);
}

TEST_CASE("ball multigrid preconditioner accelerates Krylov") {
    auto mesh = Mesh::ball(1, 64, 1.0);
    pde::BallSystem sys(mesh);
    const int d = sys.dim();
    auto& c = sys.coefficients();
    std::vector<double> packed(pde::BallSystem::packed_size(d));
    RMat I = RMat::Identity(d, d);
    pde::BallSystem::pack_sym(I, packed.data());
    for (std::int64_t i = 0; i < sys.interior(); ++i)
        std::copy(packed.begin(), packed.end(), c.begin() + i * packed.size());
    sys.update();
    CHECK(sys.levels() >= 2);
    const auto n = sys.active();
    pde::LinearOperator A(n, [&](const pde::Vec& x, pde::Vec& y) {
        y.resize(x.size());
        sys.apply(x.data(), y.data());
    });
    pde::Vec b = pde::Vec::Ones(n), x1 = pde::Vec::Zero(n), x2 = pde::Vec::Zero(n);
    auto pre = pde::bicgstab(A, [&](const pde::Vec& r, pde::Vec& z) {
        z.resize(r.size());
        sys.precondition(r.data(), z.data());
    }, b, x1, 1e-8, 2000);
    auto plain = pde::bicgstab(A, [](const pde::Vec& r, pde::Vec& z) { z = r; }, b, x2, 1e-8, 2000);
    CHECK(pre.converged);
    CHECK(pre.iterations <= 30);
    CHECK(pre.iterations * 4 < plain.iterations);
}

TEST_CASE("Dirichlet inputs are validated") {
    auto torus = Mesh::torus(1, 16);
    CHECK_THROWS_AS(pde::DirichletProblem(ScalarField(torus, 1.0)), ParameterError);
    auto mesh = Mesh::ball(1, 16, 1.0);
    CHECK_THROWS_AS(pde::DirichletProblem(ScalarField(mesh, -1.0)), DomainError);
}
