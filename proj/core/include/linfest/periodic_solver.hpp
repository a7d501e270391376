#pragma once

#include <optional>

#include "linfest/cone.hpp"
#include "linfest/field.hpp"
#include "linfest/solve_report.hpp"

namespace linfest::pde {

struct PeriodicOptions {
    int max_newton = 60;
    int max_halvings = 40;
    long max_krylov = 400;
    // Solve on m/2 first while the coarse grid keeps m >= nested_min_m.
    bool nested = true;
    int nested_min_m = 16;
    bool verbose = false;
    // Optional starting iterate on the same mesh.
    std::optional<geom::ScalarField> phi0;
    double b0 = 0.0;
};

// f(lambda[h_phi]) = exp(F + b) on a torus; returns phi with sup phi = 0 and b.
SolveReport solve_periodic_fnl(const cone::OperatorSpec& op, const geom::HermitianField& omega,
                               const geom::ScalarField& F, double tol = 1e-6,
                               const PeriodicOptions& opt = {});

// Pointwise residual max |f(lambda[h_phi]) - exp(F + b)| and count of nodes outside the cone.
double periodic_residual(const cone::OperatorSpec& op, const geom::HermitianField& omega,
                         const geom::ScalarField& F, const geom::ScalarField& phi, double b,
                         int* violations = nullptr);

// Injection of a torus field onto the m/2 torus, and periodic multilinear prolongation.
geom::ScalarField restrict_torus(const geom::ScalarField& f, geom::MeshPtr coarse);
geom::HermitianField restrict_torus(const geom::HermitianField& f, geom::MeshPtr coarse);
geom::ScalarField prolong_torus(const geom::ScalarField& coarse, geom::MeshPtr fine);

}  // namespace linfest::pde
