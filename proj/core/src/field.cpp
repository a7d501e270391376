#include "linfest/field.hpp"

#include <cmath>
#include <numbers>

#include "linfest/error.hpp"

namespace linfest::geom {

ScalarField::ScalarField(MeshPtr m, double value) : mesh(std::move(m)) {
    if (!mesh) throw ParameterError("scalar field without mesh");
    data.assign(mesh->size(), value);
}

ScalarField::ScalarField(MeshPtr m, std::vector<double> values)
    : mesh(std::move(m)), data(std::move(values)) {
    if (!mesh) throw ParameterError("scalar field without mesh");
    if (static_cast<std::int64_t>(data.size()) != mesh->size())
        throw ParameterError("scalar field size does not match mesh");
}

HermitianField::HermitianField(MeshPtr mesh, bool uniform)
    : mesh_(std::move(mesh)), uniform_(uniform) {
    if (!mesh_) throw ParameterError("hermitian field without mesh");
    n_ = mesh_->n();
    data_.assign((uniform_ ? 1 : mesh_->size()) * n_ * n_, 0.0);
}

HermitianField HermitianField::identity(MeshPtr mesh) {
    HermitianField f(std::move(mesh), true);
    for (int j = 0; j < f.n_; ++j) f.data_[j] = 1.0;
    return f;
}

HermitianField HermitianField::constant(MeshPtr mesh, const HMat& value) {
    HermitianField f(std::move(mesh), true);
    if (value.rows() != f.n_ || value.cols() != f.n_)
        throw ParameterError("constant metric has the wrong size");
    f.set(0, value);
    return f;
}

HermitianField HermitianField::perturbed(MeshPtr mesh, double delta) {
    if (!(std::abs(delta) <= 0.5))
        throw ParameterError("metric perturbation needs |delta| <= 1/2 to keep I/2 <= omega <= 2I");
    HermitianField f(mesh, false);
    const int n = f.n_;
    const double L = mesh->is_torus() ? mesh->period() : 4.0 * mesh->radius();
    const double w = 2.0 * std::numbers::pi / L;
    const double off = n > 1 ? 0.5 / (n - 1) : 0.0;
    std::vector<double> x(mesh->dim());
    HMat a(n, n);
    for (std::int64_t i = 0; i < mesh->size(); ++i) {
        mesh->coordinates(i, x.data());
        a.setZero();
        for (int j = 0; j < n; ++j)
            a(j, j) = 1.0 + delta * 0.5 * std::cos(w * x[2 * j] + 0.3 * j) *
                                std::cos(w * x[2 * ((j + 1) % n) + 1]);
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                const cplx s(std::cos(w * (x[2 * j] + x[2 * k + 1])),
                             std::sin(w * (x[2 * j + 1] - x[2 * k])));
                a(j, k) = delta * off * s / std::sqrt(2.0);
                a(k, j) = std::conj(a(j, k));
            }
        f.set(i, a);
    }
    return f;
}

}  // namespace linfest::geom
