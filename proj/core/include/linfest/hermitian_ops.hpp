#pragma once

#include <cstdint>

#include "linfest/field.hpp"

namespace linfest::geom {

struct EntropyReport {
    double p = 0.0;
    double value = 0.0;
    double mass = 0.0;
};

// Complex Hessian at one node; ball nodes must be interior.
HMat dd_bar_at(const ScalarField& phi, std::int64_t idx);
// Zero at non-interior ball nodes.
HermitianField dd_bar(const ScalarField& phi);
HermitianField add(const HermitianField& a, const HermitianField& b);
// omega + i ddbar phi
HermitianField omega_phi(const HermitianField& omega, const ScalarField& phi);

EigenField endo_eigenvalues(const HermitianField& omega, const HermitianField& omega_phi);
ScalarField laplacian(const HermitianField& omega, const ScalarField& phi);

double det_metric(const HermitianField& omega, std::int64_t idx);
// det(g) per node.
ScalarField volume_density(const HermitianField& omega);

// Sum of field * det(g) * h^{2n}; interior nodes only on balls.
double integrate(const ScalarField& field, const HermitianField& omega);
double integrate_density(const ScalarField& field, const ScalarField& density);

EntropyReport entropy(const ScalarField& F, const HermitianField& omega, double p);
ScalarField sup_normalize(const ScalarField& phi);

// Nodes a reduction runs over: every node on a torus, interior nodes on a ball.
template <class Fn>
void for_each_active(const Mesh& mesh, Fn&& fn) {
    if (mesh.is_torus()) {
        for (std::int64_t i = 0; i < mesh.size(); ++i) fn(i);
    } else {
        for (std::int64_t i : mesh.interior()) fn(i);
    }
}

}  // namespace linfest::geom
