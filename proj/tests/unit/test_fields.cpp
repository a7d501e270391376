#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "linfest/field_io.hpp"
#include "linfest/hermitian_ops.hpp"
#include "linfest/periodic_solver.hpp"
#include "oracles.hpp"

using namespace linfest;
using namespace linfest::geom;

TEST_CASE("torus mesh indexing is periodic") {
    auto mesh = Mesh::torus(2, 8, 1.0);
    CHECK(mesh->size() == 8 * 8 * 8 * 8);
    CHECK(mesh->spacing() == doctest::Approx(0.125));
    for (std::int64_t i = 0; i < mesh->size(); i += 37) {
        int mi[8];
        mesh->multi_index(i, mi);
        CHECK(mesh->linear_index(mi) == i);
        for (int a = 0; a < 4; ++a) {
            CHECK(mesh->shift(mesh->shift(i, a, 3), a, -3) == i);
            CHECK(mesh->shift(i, a, 8) == i);
        }
    }
    CHECK(mesh->coordinate(0, 0) == doctest::Approx(-0.5));
}

TEST_CASE("ball mesh classification") {
    auto mesh = Mesh::ball(1, 16, 0.5);
    std::vector<double> x(2);
    for (auto i : mesh->interior()) {
        mesh->coordinates(i, x.data());
        CHECK(x[0] * x[0] + x[1] * x[1] < 0.25);
        CHECK(mesh->kind(i) == NodeKind::Interior);
    }
    for (auto i : mesh->boundary()) CHECK(mesh->kind(i) == NodeKind::Boundary);
    CHECK_FALSE(mesh->interior().empty());
}

TEST_CASE("complex Hessian of quadratics") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> N;
    auto mesh = Mesh::ball(2, 8, 1.0);
    Eigen::MatrixXd H(4, 4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) H(a, b) = N(rng);
    H = 0.5 * (H + H.transpose()).eval();
    auto psi = ScalarField::from_function(mesh, [&](const double* x) {
        Eigen::Map<const Eigen::Vector4d> v(x);
        return 0.5 * v.dot(H * v);
    });
    auto ref = oracle::complex_hessian(H);
    auto idx = mesh->interior()[mesh->interior().size() / 2];
    HMat A = dd_bar_at(psi, idx);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) CHECK(std::abs(A(j, k) - ref(j, k)) < 1e-10);
    RMat Hr(4, 4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) Hr(a, b) = H(a, b);
    HMat B = complex_hessian(Hr);
    CHECK((B - A).norm() < 1e-10);
}

TEST_CASE("identity metric and zero potential give unit eigenvalues") {
    auto mesh = Mesh::torus(2, 8);
    auto omega = HermitianField::identity(mesh);
    ScalarField phi(mesh, 0.0);
    auto ev = endo_eigenvalues(omega, omega_phi(omega, phi));
    for (double v : ev.data) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("integration and entropy") {
    auto mesh = Mesh::torus(2, 8, 2.0);
    auto omega = HermitianField::identity(mesh);
    ScalarField one(mesh, 1.0);
    CHECK(integrate(one, omega) == doctest::Approx(16.0));
    ScalarField F(mesh, 0.5);
    auto e = entropy(F, omega, 4.0);
    CHECK(e.value == doctest::Approx((1 + std::pow(0.5, 4)) * std::exp(1.0) * 16.0));
    CHECK(e.mass == doctest::Approx(std::exp(1.0) * 16.0));
    auto perturbed = HermitianField::perturbed(mesh, 0.3);
    for (std::int64_t i = 0; i < mesh->size(); i += 97) CHECK(det_metric(perturbed, i) > 0.0);
}

TEST_CASE("sup normalisation") {
    auto mesh = Mesh::torus(1, 16);
    auto f = ScalarField::from_function(mesh, [](const double* x) { return std::sin(2 * M_PI * x[0]) + 3.0; });
    auto g = sup_normalize(f);
    CHECK(*std::max_element(g.data.begin(), g.data.end()) == 0.0);
}

TEST_CASE("field files round trip") {
    auto dir = std::filesystem::temp_directory_path() / "linfest_unit_io";
    std::filesystem::create_directories(dir);
    auto mesh = Mesh::ball(1, 16, 0.5);
    auto f = ScalarField::from_function(mesh, [](const double* x) { return x[0] - 2 * x[1]; });
    write_field((dir / "f.field").string(), f);
    auto g = read_scalar_field((dir / "f.field").string());
    CHECK(g.mesh->same_as(*mesh));
    CHECK(g.data == f.data);
    CHECK(peek_field_kind((dir / "f.field").string()) == "scalar");
    auto om = HermitianField::perturbed(Mesh::torus(2, 8), 0.2);
    write_field((dir / "o.field").string(), om);
    auto om2 = read_hermitian_field((dir / "o.field").string());
    CHECK(om2.raw() == om.raw());
    CHECK(peek_field_kind((dir / "o.field").string()) == "hermitian");
    std::ostringstream os;
    write_csv(os, f);
    CHECK(os.str().find('\n') != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("torus restriction and prolongation") {
    auto fine = Mesh::torus(2, 16);
    auto coarse = Mesh::torus(2, 8);
    auto f = ScalarField::from_function(fine, [](const double* x) { return std::cos(2 * M_PI * x[0]) * std::sin(2 * M_PI * x[3]); });
    auto c = pde::restrict_torus(f, coarse);
    std::vector<double> x(4);
    for (std::int64_t i = 0; i < coarse->size(); ++i) {
        coarse->coordinates(i, x.data());
        CHECK(c[i] == doctest::Approx(std::cos(2 * M_PI * x[0]) * std::sin(2 * M_PI * x[3])));
    }
    auto p = pde::prolong_torus(c, fine);
    double err = 0.0;
    for (std::int64_t i = 0; i < fine->size(); ++i) err = std::max(err, std::abs(p[i] - f[i]));
    CHECK(err < 0.2);
}
