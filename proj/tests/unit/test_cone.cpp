#include <random>

#include "doctest.h"
#include "linfest/cone.hpp"
#include "linfest/error.hpp"
#include "oracles.hpp"

using namespace linfest;
using cone::ConeSpec;
using cone::OperatorSpec;

namespace {

std::vector<double> gaussian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    std::vector<double> v(n);
    for (auto& x : v) x = N(rng);
    return v;
}

}  // namespace

TEST_CASE("sigma matches subset enumeration") {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 6; ++n)
        for (int k = 1; k <= n; ++k)
            for (int t = 0; t < 50; ++t) {
                auto l = gaussian(n, rng);
                const double ref = oracle::sigma(l, k);
                CHECK(cone::sigma(l, k) == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
            }
}

TEST_CASE("cone membership agrees with the defining inequalities") {
    std::mt19937_64 rng(12);
    for (int n = 2; n <= 5; ++n)
        for (int k = 1; k <= n; ++k) {
            auto g = ConeSpec::gamma(n, k);
            auto p = ConeSpec::pma(n, k);
            for (int t = 0; t < 300; ++t) {
                auto l = gaussian(n, rng);
                for (auto& x : l) x += 0.3;
                CHECK(cone::in_cone(l, g) == oracle::in_gamma(l, k));
                CHECK(cone::in_cone(l, p) == oracle::in_pma(l, k));
            }
        }
}

TEST_CASE("cone nesting") {
    std::mt19937_64 rng(13);
    const int n = 4;
    for (int t = 0; t < 2000; ++t) {
        auto l = gaussian(n, rng);
        for (int k = n; k > 1; --k)
            if (cone::in_cone(l, ConeSpec::gamma(n, k))) CHECK(cone::in_cone(l, ConeSpec::gamma(n, k - 1)));
        for (int p = 1; p < n; ++p)
            if (cone::in_cone(l, ConeSpec::pma(n, p))) CHECK(cone::in_cone(l, ConeSpec::pma(n, p + 1)));
    }
}

TEST_CASE("operator values match closed forms") {
    std::mt19937_64 rng(14);
    for (int n = 2; n <= 4; ++n) {
        auto ma = OperatorSpec::monge_ampere(n);
        auto he = OperatorSpec::hessian(n, 2);
        auto pm = OperatorSpec::pma(n, n - 1);
        for (int t = 0; t < 100; ++t) {
            auto l = cone::sample_cone_point(ma.cone, rng);
            CHECK(cone::f_value(ma, l) == doctest::Approx(oracle::monge_ampere(l)).epsilon(1e-12));
            auto lh = cone::sample_cone_point(he.cone, rng);
            CHECK(cone::f_value(he, lh) == doctest::Approx(oracle::hessian(lh, 2)).epsilon(1e-12));
            auto lp = cone::sample_cone_point(pm.cone, rng);
            CHECK(cone::f_value(pm, lp) == doctest::Approx(oracle::pma(lp, n - 1)).epsilon(1e-12));
        }
    }
}

TEST_CASE("positive combination is the weighted sum") {
    auto op = OperatorSpec::positive_combination({0.5, 2.0}, {OperatorSpec::monge_ampere(3), OperatorSpec::hessian(3, 2)});
    std::vector<double> l{1.0, 2.0, 0.5};
    const double ref = 0.5 * oracle::monge_ampere(l) + 2.0 * oracle::hessian(l, 2);
    CHECK(cone::f_value(op, l) == doctest::Approx(ref).epsilon(1e-13));
    CHECK(op.gamma > 0.0);
}

TEST_CASE("gradient agrees with finite differences") {
    std::mt19937_64 rng(15);
    std::vector<OperatorSpec> ops{OperatorSpec::monge_ampere(3), OperatorSpec::hessian(3, 2), OperatorSpec::pma(3, 2)};
    for (const auto& op : ops)
        for (int t = 0; t < 100; ++t) {
            auto l = cone::sample_cone_point(op.cone, rng);
            const double margin = cone::cone_margin(l.data(), op.cone);
            if (margin < 1e-2) continue;
            auto g = cone::f_gradient(op, l);
            auto fd = oracle::fd_gradient([&](const std::vector<double>& x) { return cone::f_value(op, x); }, l,
                                          1e-3 * margin);
            for (int i = 0; i < op.n; ++i) CHECK(g[i] == doctest::Approx(fd[i]).epsilon(1e-6));
        }
}

TEST_CASE("Monge-Ampere structural constant is exact") {
    for (int n = 2; n <= 4; ++n) {
        auto op = OperatorSpec::monge_ampere(n);
        CHECK(op.gamma == std::pow(double(n), -n));
        auto cert = cone::certify_gamma(op, 10, 1);
        CHECK(cert.exact);
    }
}

TEST_CASE("sampled structural constant bounds every sample") {
    auto op = OperatorSpec::hessian(3, 2);
    CHECK(op.gamma == doctest::Approx(oracle::gamma_hessian2_n3_identity()).epsilon(1e-12));
    std::mt19937_64 rng(16);
    for (int t = 0; t < 500; ++t) {
        auto l = cone::sample_cone_point(op.cone, rng);
        CHECK(cone::structural_product(op, l) >= op.gamma * (1 - 1e-12));
    }
}

TEST_CASE("invalid inputs raise typed errors") {
    CHECK_THROWS_AS(ConeSpec::gamma(3, 4), ParameterError);
    CHECK_THROWS_AS(ConeSpec::gamma(9, 1), ParameterError);
    auto op = OperatorSpec::monge_ampere(2);
    std::vector<double> out{1.0, -1.0};
    CHECK_THROWS_AS(cone::f_value(op, out), DomainError);
    std::vector<double> edge{1.0, 0.0};
    CHECK_THROWS_AS(cone::f_gradient(op, edge), DomainError);
    std::vector<double> wrong{1.0, 1.0, 1.0};
    CHECK_THROWS_AS(cone::f_value(op, wrong), ParameterError);
    CHECK_FALSE(cone::violated_condition(out, op.cone).empty());
    CHECK(cone::violated_condition(std::vector<double>{1.0, 1.0}, op.cone).empty());
}
