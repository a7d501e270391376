#pragma once

#include <optional>

#include "linfest/field.hpp"
#include "linfest/solve_report.hpp"

namespace linfest::pde {

// Ball Dirichlet data. Boundary values at boundary nodes are read as the data at the radial
// projection of the node onto the sphere. Solutions carry ghost values at boundary nodes.
struct DirichletProblem {
    geom::ScalarField density;
    geom::ScalarField boundary;

    DirichletProblem(geom::ScalarField density, geom::ScalarField boundary);
    // Zero boundary data.
    explicit DirichletProblem(geom::ScalarField density);
    const geom::MeshPtr& mesh() const { return density.mesh; }
};

struct DirichletOptions {
    int max_newton = 60;
    int max_halvings = 40;
    long max_krylov = 400;
    bool verbose = false;
    std::optional<geom::ScalarField> psi0;
};

// det(i ddbar psi) = density with psi plurisubharmonic.
SolveReport solve_dirichlet_cma(const DirichletProblem& problem, double tol = 1e-6,
                                const DirichletOptions& opt = {});
// det(D^2 psi) = density in the 2n real coordinates with psi convex.
SolveReport solve_dirichlet_rma(const DirichletProblem& problem, double tol = 1e-6,
                                const DirichletOptions& opt = {});

// Laplacian tr(g^{-1} i ddbar h) = rhs with zero boundary data.
geom::ScalarField solve_dirichlet_linear(const geom::HermitianField& omega, double rhs,
                                         const geom::MeshPtr& mesh, double tol = 1e-8);
geom::ScalarField solve_dirichlet_linear(const geom::HermitianField& omega,
                                         const geom::ScalarField& rhs,
                                         const geom::ScalarField& boundary, double tol = 1e-8);

// Max relative defect |det H - density| / density over interior nodes; cone failures counted.
double dirichlet_residual(const DirichletProblem& problem, const geom::ScalarField& psi, bool real,
                          int* violations = nullptr);

}  // namespace linfest::pde
