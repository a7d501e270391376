#pragma once

#include <string>
#include <vector>

#include "linfest/field.hpp"

namespace linfest::pde {

struct SolveReport {
    geom::ScalarField solution;
    double residual_inf = 0.0;
    int iterations = 0;
    long krylov_iterations = 0;
    double b_constant = 0.0;
    // Nodes outside the cone on the final iterate.
    int cone_violations = 0;
    // Trial steps rejected because some node left the cone.
    int cone_rejections = 0;
    // Dirichlet solves: discrete Monge-Ampere mass of the solution.
    double mass = 0.0;
    // Smallest Hessian eigenvalue over interior nodes (Dirichlet solves).
    double min_eigenvalue = 0.0;
    bool converged = false;
    std::vector<double> history;
    double seconds = 0.0;
};

std::string to_json(const SolveReport& r, bool include_timing = true);

}  // namespace linfest::pde
