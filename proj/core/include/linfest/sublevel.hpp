#pragma once

#include <cstdint>
#include <vector>

#include "linfest/dirichlet_solver.hpp"
#include "linfest/field.hpp"

namespace linfest::lab {

// Ball B(x0, 2 r0) in coordinates z centred at x0, sharing the source spacing.
// source[i] is the source node feeding chart node i. Torus sources wrap periodically;
// ball sources are continued outside their interior by the nearest interior value.
struct Chart {
    geom::MeshPtr mesh;
    geom::MeshPtr source_mesh;
    std::vector<std::int64_t> source;
    std::int64_t x0_source = 0;
    std::int64_t x0 = 0;
    double r0 = 0.0;
};

Chart make_chart(const geom::MeshPtr& source, std::int64_t x0, double r0);
geom::ScalarField pull_back(const Chart& chart, const geom::ScalarField& f);
geom::HermitianField pull_back(const Chart& chart, const geom::HermitianField& f);

// Lowest-index minimiser over active nodes.
std::int64_t argmin_node(const geom::ScalarField& phi);

// u_s = phi - phi(x0) + eps' |z - x0|^2 - s.
geom::ScalarField build_u_s(const geom::ScalarField& phi, std::int64_t x0, double s,
                            double eps_prime = 0.5);

// tau_k(x) = (x + sqrt(x^2 + k^-2)) / 2.
double tau_k(double x, double k);

struct SublevelReport {
    double s = 0.0;
    std::int64_t x0 = 0;
    geom::ScalarField u_s;
    std::vector<std::uint8_t> mask;
    double A_s = 0.0;
    double phi_of_s = 0.0;
    double A_sk = 0.0;
    double k = 0.0;
    std::int64_t mask_nodes = 0;
};

SublevelReport sublevel_masses(const geom::ScalarField& u_s, const geom::ScalarField& F,
                               const geom::HermitianField& omega, double k);

// Density tau_k(-u_s) e^{nF} det g / A_{s,k} of the auxiliary Dirichlet problem.
pde::DirichletProblem auxiliary_problem(const SublevelReport& report, const geom::ScalarField& F,
                                        const geom::HermitianField& omega);

// count values logarithmically spaced in [1e-3 s0, s0].
std::vector<double> s_grid(double s0, int count = 32);

}  // namespace linfest::lab
