#include <benchmark/benchmark.h>

#include <random>

#include "linfest/cone.hpp"
#include "linfest/dirichlet_solver.hpp"
#include "linfest/hermitian_ops.hpp"
#include "linfest/inequalities.hpp"
#include "linfest/periodic_solver.hpp"
#include "linfest/sublevel.hpp"

using namespace linfest;

static void BM_HessianEvaluate(benchmark::State& st) {
    const auto op = cone::OperatorSpec::hessian(static_cast<int>(st.range(0)), 2);
    std::mt19937_64 rng(3);
    const auto lam = cone::sample_cone_point(op.cone, rng);
    std::vector<double> grad(lam.size());
    for (auto _ : st) benchmark::DoNotOptimize(cone::evaluate(op, lam.data(), grad.data()));
}
BENCHMARK(BM_HessianEvaluate)->Arg(2)->Arg(4);

static void BM_ComplexHessianField(benchmark::State& st) {
    const auto mesh = geom::Mesh::torus(2, static_cast<int>(st.range(0)));
    const auto phi = geom::ScalarField::from_function(mesh, [](const double* x) { return 0.01 * std::cos(6.28 * x[0]); });
    for (auto _ : st) benchmark::DoNotOptimize(geom::dd_bar(phi));
}
BENCHMARK(BM_ComplexHessianField)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_PeriodicMongeAmpere(benchmark::State& st) {
    const auto mesh = geom::Mesh::torus(2, static_cast<int>(st.range(0)));
    const auto omega = geom::HermitianField::identity(mesh);
    const auto F = geom::ScalarField::from_function(mesh, [](const double* x) {
        return 0.5 * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]) / 0.045);
    });
    const auto op = cone::OperatorSpec::monge_ampere(2);
    for (auto _ : st) benchmark::DoNotOptimize(pde::solve_periodic_fnl(op, omega, F, 1e-8));
}
BENCHMARK(BM_PeriodicMongeAmpere)->Arg(16)->Unit(benchmark::kMillisecond)->Iterations(3);

static void BM_RadialDirichletCMA(benchmark::State& st) {
    const auto mesh = geom::Mesh::ball(2, static_cast<int>(st.range(0)), 1.0);
    for (auto _ : st) {
        pde::DirichletProblem prob(geom::ScalarField(mesh, 1.0));
        benchmark::DoNotOptimize(pde::solve_dirichlet_cma(prob, 1e-8));
    }
}
BENCHMARK(BM_RadialDirichletCMA)->Arg(16)->Unit(benchmark::kMillisecond)->Iterations(3);

static void BM_SublevelMasses(benchmark::State& st) {
    const auto mesh = geom::Mesh::ball(2, 16, 0.125);
    const auto phi = geom::ScalarField(mesh, 0.0);
    const auto F = geom::ScalarField(mesh, 0.0);
    const auto omega = geom::HermitianField::identity(mesh);
    const std::int64_t x0 = lab::argmin_node(phi);
    const auto u = lab::build_u_s(phi, x0, 1e-3);
    for (auto _ : st) benchmark::DoNotOptimize(lab::sublevel_masses(u, F, omega, 1e4));
}
BENCHMARK(BM_SublevelMasses)->Unit(benchmark::kMicrosecond);

static void BM_YoungGap(benchmark::State& st) {
    double u = 1.0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(lab::young_gap(u, 2.0 * u, 2.5));
        u = u < 1e3 ? u * 1.001 : 1.0;
    }
}
BENCHMARK(BM_YoungGap);
BENCHMARK_MAIN();
