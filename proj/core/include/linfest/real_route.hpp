#pragma once

#include "linfest/field.hpp"

namespace linfest::lab {

// Volume of the unit ball in R^dim.
double unit_ball_volume(int dim);

struct AbpResult {
    double depth_residual = 0.0;     // -min psi - 4 r0 / beta_n
    double gradient_residual = 0.0;  // max_{B(c, r0)} |grad psi| - 4 / beta_n
    double depth = 0.0;
    double max_gradient = 0.0;
    double mass = 0.0;
};

// psi solves the real Monge-Ampere Dirichlet problem on a ball of radius 2 r0 with zero data.
// Requires a convex psi with discrete real Hessian mass within mass_tol of 1.
AbpResult abp_check(const geom::ScalarField& psi, double r0, double mass_tol = 0.05);

// det(complex Hessian) - 2^{-n} sqrt(det H) for a real Hessian H.
double blocki_gap(const geom::RMat& H);

// min over interior nodes of blocki_gap; throws PreconditionError at a non-convex node.
double hessian_det_comparison(const geom::ScalarField& psi, double convexity_slack = 1e-9);

}  // namespace linfest::lab
