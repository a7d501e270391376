#include <cmath>
#include <random>

#include "doctest.h"
#include "linfest/certificate.hpp"
#include "linfest/check_record.hpp"
#include "linfest/degiorgi.hpp"
#include "linfest/error.hpp"
#include "linfest/inequalities.hpp"
#include "linfest/real_route.hpp"
#include "linfest/sublevel.hpp"
#include "linfest/theta.hpp"
#include "oracles.hpp"

using namespace linfest;
using namespace linfest::geom;

namespace {

// Smooth periodic bowl with its minimum at the origin node.
ScalarField bowl(const MeshPtr& mesh, double depth) {
    return ScalarField::from_function(mesh, [&](const double* x) {
        double s = 0.0;
        for (int a = 0; a < mesh->dim(); ++a) s += 1.0 - std::cos(2 * M_PI * x[a]);
        return -depth + 0.1 * s;
    });
}

}  // namespace

TEST_CASE("tau_k smooths the positive part") {
    for (double k : {1.0, 10.0, 1e4})
        for (double x : {-1e8, -3.0, -1e-3, 0.0, 1e-3, 2.0}) {
            const double t = lab::tau_k(x, k);
            CHECK(t > std::max(x, 0.0));
            CHECK(t - std::max(x, 0.0) <= 0.5 / k * (1 + 1e-12));
            if (x > -10.0) CHECK(t == doctest::Approx(0.5 * (x + std::sqrt(x * x + 1.0 / (k * k)))).epsilon(1e-9));
            else CHECK(t == doctest::Approx(0.25 / (k * k * -x)).epsilon(1e-6));
        }
}

TEST_CASE("epsilon of the comparison lemma") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> U(0.01, 10.0);
    for (int n = 1; n <= 3; ++n)
        for (int t = 0; t < 20; ++t) {
            const double A = U(rng), g = U(rng);
            const double ref = std::pow(A / g * std::pow(n + 1.0, n) / std::pow(double(n), 2 * n), 1.0 / (n + 1));
            CHECK(lab::epsilon_lemma2(A, g, n) == doctest::Approx(ref).epsilon(1e-13));
            CHECK(lab::comparison_constant(g, n) * std::pow(A, 1.0 / (n + 1)) == doctest::Approx(ref).epsilon(1e-13));
        }
    CHECK(lab::epsilon_lemma2(1.0, 0.25, 2) == doctest::Approx(std::cbrt(2.25)).epsilon(1e-15));
}

TEST_CASE("sublevel construction on a torus chart") {
    auto mesh = Mesh::torus(2, 16);
    auto omega = HermitianField::identity(mesh);
    auto phi = bowl(mesh, 1.0);
    const auto x0 = lab::argmin_node(phi);
    auto chart = lab::make_chart(mesh, x0, 0.125);
    auto phic = lab::pull_back(chart, phi);
    CHECK(phic[chart.x0] == phi[x0]);
    CHECK(chart.mesh->radius() == doctest::Approx(0.25));
    auto Fc = lab::pull_back(chart, ScalarField(mesh, 0.0));
    auto omc = lab::pull_back(chart, omega);
    const double s0 = 2 * 0.125 * 0.125;
    auto u = lab::build_u_s(phic, chart.x0, s0);
    CHECK(u[chart.x0] == doctest::Approx(-s0));
    auto r1 = lab::sublevel_masses(u, Fc, omc, 10.0 / s0);
    auto r2 = lab::sublevel_masses(u, Fc, omc, 20.0 / s0);
    CHECK(r1.A_s > 0.0);
    CHECK(r1.A_sk >= r1.A_s);
    CHECK(r2.A_sk <= r1.A_sk);
    CHECK(r1.mask_nodes > 0);
    auto ru = lab::sublevel_masses(lab::build_u_s(phic, chart.x0, 0.5 * s0), Fc, omc, 10.0 / s0);
    CHECK(ru.phi_of_s <= r1.phi_of_s);
    CHECK(lab::mass_inequality_residual(r1, ru, 0.5 * s0) <= 1e-14);
    auto prob = lab::auxiliary_problem(r1, Fc, omc);
    CHECK(prob.mesh()->same_as(*chart.mesh));
    CHECK_THROWS_AS(lab::make_chart(mesh, x0, 0.1), ParameterError);
    CHECK_THROWS_AS(lab::sublevel_masses(u, Fc, omc, 0.5), ParameterError);
}

TEST_CASE("u_s rejects a non-minimal centre") {
    auto mesh = Mesh::ball(1, 16, 0.5);
    auto phi = ScalarField::from_function(mesh, [](const double* x) { return x[0]; });
    CHECK_THROWS_AS(lab::build_u_s(phi, mesh->interior()[mesh->interior().size() / 2], 0.01), PreconditionError);
}

TEST_CASE("s grid") {
    auto g = lab::s_grid(0.5, 32);
    REQUIRE(g.size() == 32);
    CHECK(g.front() == doctest::Approx(5e-4));
    CHECK(g.back() == doctest::Approx(0.5));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]));
}

TEST_CASE("comparison residual") {
    auto mesh = Mesh::ball(1, 16, 0.5);
    ScalarField u(mesh, -0.1), psi(mesh, -1.0);
    CHECK(lab::comparison_residual(u, psi, 1.0) == doctest::Approx(0.1 - 1.0));
    CHECK(lab::comparison_residual(u, psi, 1.0, 1.0) == doctest::Approx(0.1 - std::pow(2.0, 2.0 / 3.0)));
}

TEST_CASE("Young gap is nonnegative and matches the direct formula") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> U(0.0, 50.0), P(1.0, 6.0);
    for (int t = 0; t < 20000; ++t) {
        const double u = U(rng), v = U(rng), p = P(rng);
        const double g = lab::young_gap(u, v, p);
        CHECK(g >= -1e-12);
        CHECK(g == doctest::Approx(oracle::young_gap(u, v, p)).epsilon(1e-9).scale(1 + u * v));
    }
    for (double x : {0.0, 0.5, 3.0, 40.0}) CHECK(lab::young_eta_inverse(lab::young_eta(x, 3.0), 3.0) == doctest::Approx(x));
    CHECK_THROWS_AS(lab::young_gap(-1.0, 1.0, 2.0), ParameterError);
    CHECK_THROWS_AS(lab::young_gap(1.0, 1.0, 0.0), ParameterError);
}

TEST_CASE("delta0") {
    CHECK(lab::delta0(4.0, 2) == doctest::Approx(0.25));
    CHECK_THROWS_AS(lab::delta0(2.0, 2), ParameterError);
}

TEST_CASE("De Giorgi iteration on the power trace") {
    const double s0 = 0.5, d = 0.25;
    lab::PhiFunction phi = [&](double s) { return s <= 0 ? 0.0 : std::pow(s / s0, 1.0 / d); };
    const double C0 = lab::functional_constant(phi, s0, d);
    CHECK(C0 <= oracle::power_functional_constant(s0, d) * (1 + 1e-12));
    CHECK(C0 == doctest::Approx(oracle::power_functional_constant(s0, d)).epsilon(1e-3));
    auto tr = lab::degiorgi_iterate(phi, s0, C0, d);
    CHECK_FALSE(tr.floored);
    for (std::size_t j = 0; j < tr.s_sequence.size(); ++j) {
        CHECK(tr.measured_phi[j] == doctest::Approx(std::ldexp(1.0, -int(j))).epsilon(1e-12));
        CHECK(tr.s_sequence[j] == doctest::Approx(oracle::power_trace_s(s0, d, int(j))).epsilon(1e-12));
    }
    CHECK(tr.c0 == doctest::Approx(lab::degiorgi_c0(s0, C0, d)));
    CHECK(tr.c0 <= phi(s0));
    const double ref_c0 = std::pow(s0 * (1 - std::pow(2.0, -d)) / (2 * C0), 1.0 / d);
    CHECK(tr.c0 == doctest::Approx(ref_c0).epsilon(1e-13));
}

TEST_CASE("monotonicity precondition") {
    lab::PhiFunction bad = [](double s) { return 1.0 + std::sin(50 * s); };
    CHECK_THROWS_AS(lab::check_monotone(bad, 1.0), PreconditionError);
    lab::PhiFunction zero = [](double) { return 0.0; };
    CHECK_THROWS_AS(lab::check_monotone(zero, 1.0), PreconditionError);
    lab::PhiFunction good = [](double s) { return s; };
    CHECK_NOTHROW(lab::check_monotone(good, 1.0));
}

TEST_CASE("Theta at the identity point") {
    for (int n : {2, 3, 4}) {
        auto op = cone::OperatorSpec::monge_ampere(n);
        std::vector<double> one(n, 1.0);
        auto p = lab::theta_point(op, one, HMat::Identity(n, n));
        CHECK(p.det == doctest::Approx(oracle::theta_det_identity_ma(n)).epsilon(1e-12));
        CHECK(std::abs(p.residual) < 1e-12);
        CHECK(p.min_eigenvalue == doctest::Approx(1.0 / n));
    }
    auto op = cone::OperatorSpec::hessian(3, 2);
    std::vector<double> one(3, 1.0);
    auto p = lab::theta_point(op, one, HMat::Identity(3, 3));
    CHECK(p.det == doctest::Approx(oracle::theta_det_identity_hessian2_n3()).epsilon(1e-12));
    CHECK(std::abs(p.scaled_residual) < 1e-12);
}

TEST_CASE("Theta inequality at random points and metrics") {
    std::mt19937_64 rng(33);
    std::normal_distribution<double> N;
    for (int n : {2, 3}) {
        auto op = cone::OperatorSpec::hessian(n, 2);
        for (int t = 0; t < 500; ++t) {
            auto l = cone::sample_cone_point(op.cone, rng);
            HMat A(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) A(i, j) = cplx(N(rng), N(rng));
            HMat g = A * A.adjoint() + 0.1 * HMat::Identity(n, n);
            auto p = lab::theta_point(op, l, g);
            CHECK(p.scaled_residual >= -1e-10);
            CHECK(p.min_eigenvalue > 0.0);
        }
    }
    CHECK_THROWS_AS(lab::theta_point(cone::OperatorSpec::monge_ampere(1), std::vector<double>{1.0}, HMat::Identity(1, 1)),
                    ParameterError);
    CHECK_THROWS_AS(lab::theta_point(cone::OperatorSpec::monge_ampere(2), std::vector<double>{1.0, -1.0}, HMat::Identity(2, 2)),
                    ConeError);
}

TEST_CASE("real and complex Hessian determinants") {
    CHECK(lab::blocki_gap(RMat::Identity(4, 4)) == doctest::Approx(0.0).scale(1.0));
    std::mt19937_64 rng(34);
    std::normal_distribution<double> N;
    for (int t = 0; t < 300; ++t) {
        RMat A(4, 4);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) A(a, b) = N(rng);
        RMat H = A * A.transpose() + 1e-3 * RMat::Identity(4, 4);
        Eigen::MatrixXd Hd = H;
        const double lhs = oracle::complex_hessian(Hd).determinant().real();
        CHECK(lab::blocki_gap(H) == doctest::Approx(lhs - 0.25 * std::sqrt(H.determinant())).epsilon(1e-10));
        CHECK(lab::blocki_gap(H) >= -1e-12 * std::sqrt(H.determinant()));
    }
    auto mesh = Mesh::ball(2, 8, 1.0);
    auto concave = ScalarField::from_function(mesh, [](const double* x) { return -x[0] * x[0]; });
    CHECK_THROWS_AS(lab::hessian_det_comparison(concave), PreconditionError);
}

TEST_CASE("ABP bounds on the radial real solution") {
    const double r0 = 0.25;
    auto mesh = Mesh::ball(1, 32, 2 * r0);
    const double h = mesh->spacing();
    ScalarField rho(mesh, 0.0);
    for (auto i : mesh->interior()) rho[i] = 1.0 / (mesh->interior().size() * h * h);
    auto rep = pde::solve_dirichlet_rma(pde::DirichletProblem(rho), 1e-10);
    auto abp = lab::abp_check(rep.solution, r0);
    CHECK(abp.mass == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(abp.depth_residual < 0.0);
    CHECK(abp.gradient_residual < 0.0);
    CHECK(abp.depth == doctest::Approx(r0 / std::sqrt(M_PI)).epsilon(0.02));
    CHECK(lab::unit_ball_volume(2) == doctest::Approx(M_PI));
    CHECK(lab::unit_ball_volume(5) == doctest::Approx(oracle::unit_ball_volume(5)));
    CHECK_THROWS_AS(lab::abp_check(ScalarField(mesh, 0.0), r0), PreconditionError);
}

TEST_CASE("Young tail constant") {
    for (double p : {2.5, 4.0}) {
        double best = 0.0;
        for (double u = 1e-4; u < 400.0; u *= 1.0005)
            best = std::max(best, u * std::expm1(std::pow(u, 1.0 / p)) / (1.0 + std::exp(u)));
        const double c = lab::young_tail_constant(p);
        CHECK(c >= best);
        CHECK(c == doctest::Approx(best).epsilon(1e-6));
    }
}

TEST_CASE("certificate chain") {
    auto mesh = Mesh::torus(2, 8);
    auto omega = HermitianField::identity(mesh);
    ScalarField F(mesh, 0.0);
    auto e = entropy(F, omega, 4.0);
    lab::IterationTrace tr;
    tr.s_sequence = {0.03};
    tr.phi_values = {0.01};
    tr.c0 = 0.005;
    auto shallow = bowl(mesh, 1.0);
    auto c = lab::certify_min(shallow, F, omega, 4.0, e, tr);
    CHECK(c.trivial);
    CHECK(c.value == 2.0);
    auto deep = bowl(mesh, 50.0);
    c = lab::certify_min(deep, F, omega, 4.0, e, tr);
    CHECK_FALSE(c.trivial);
    const double K1 = 8.0 * 16.0 * e.value + c.tail_constant * 1.0;
    CHECK(c.K1 == doctest::Approx(K1).epsilon(1e-12));
    double l1 = 0.0;
    for (double v : deep.data) l1 += std::abs(v);
    CHECK(c.K2 == doctest::Approx(c.tail_constant * l1 / mesh->size()).epsilon(1e-12));
    const double lhs = 0.5 * c.log_T * 0.01, rhs = c.K1 + c.K2 * std::exp(-0.5 * c.log_T);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    CHECK(c.log_value >= std::log(50.0));
    CHECK(lab::min_bound_certificate_c0(deep, F, omega, 4.0, e, tr) >= c.value);
}

TEST_CASE("volume floor experiment rejects instances outside the cone") {
    auto mesh = Mesh::torus(1, 16);
    auto omega = HermitianField::identity(mesh);
    lab::VolumeInstance good{ScalarField::from_function(mesh, [](const double* x) { return 0.01 * std::cos(2 * M_PI * x[0]); }),
                             ScalarField(mesh, 0.0), omega};
    lab::VolumeInstance bad{ScalarField::from_function(mesh, [](const double* x) { return 0.5 * std::cos(2 * M_PI * x[0]); }),
                            ScalarField(mesh, 0.0), omega};
    auto r = lab::volume_floor_experiment({good, bad}, 2.0);
    CHECK(r.masses.size() == 1);
    REQUIRE(r.rejected.size() == 1);
    CHECK(r.rejected[0].first == 1);
    CHECK(r.min_mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("check records") {
    auto r = lab::make_record("comparison", "x", -1.0, 0.0);
    CHECK(r.pass);
    CHECK_FALSE(lab::make_record("comparison", "x", 1.0, 0.5).pass);
    CHECK_FALSE(lab::make_record("comparison", "x", NAN, 1.0).pass);
    CHECK(lab::to_json(lab::make_record("a", "b", NAN, 1.0)).find("null") != std::string::npos);
}
