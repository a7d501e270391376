#include "linfest/hermitian_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "linfest/error.hpp"
#include "linfest/stencil.hpp"

namespace linfest::geom {

namespace {

void require_same(const Mesh& a, const Mesh& b, const char* what) {
    if (!a.same_as(b)) throw ParameterError(std::string(what) + ": mesh mismatch");
}

bool active(const Mesh& mesh, std::int64_t i) {
    return mesh.is_torus() || mesh.kind(i) == NodeKind::Interior;
}

double det_packed(const double* p, int n) {
    if (n == 1) return p[0];
    if (n == 2) return p[0] * p[1] - (p[2] * p[2] + p[3] * p[3]);
    return unpack(p, n).determinant().real();
}

}  // namespace

HMat dd_bar_at(const ScalarField& phi, std::int64_t idx) {
    const Mesh& mesh = *phi.mesh;
    if (idx < 0 || idx >= mesh.size()) throw IndexError("node index out of range");
    if (!active(mesh, idx))
        throw IndexError("dd_bar queried at non-interior ball node " + std::to_string(idx));
    RMat H;
    real_hessian(node_stencil(mesh, idx), phi.data.data(), mesh.spacing(), H);
    return complex_hessian(H);
}

HermitianField dd_bar(const ScalarField& phi) {
    const Mesh& mesh = *phi.mesh;
    HermitianField out(phi.mesh, false);
    RMat H;
    for_each_active(mesh, [&](std::int64_t i) {
        real_hessian(node_stencil(mesh, i), phi.data.data(), mesh.spacing(), H);
        out.set(i, complex_hessian(H));
    });
    return out;
}

HermitianField add(const HermitianField& a, const HermitianField& b) {
    require_same(*a.mesh(), *b.mesh(), "add");
    const bool uni = a.uniform() && b.uniform();
    HermitianField out(a.mesh(), uni);
    const int k = a.n() * a.n();
    const std::int64_t count = uni ? 1 : a.mesh()->size();
    for (std::int64_t i = 0; i < count; ++i) {
        const double* pa = a.packed(i);
        const double* pb = b.packed(i);
        double* po = out.packed(i);
        for (int j = 0; j < k; ++j) po[j] = pa[j] + pb[j];
    }
    return out;
}

HermitianField omega_phi(const HermitianField& omega, const ScalarField& phi) {
    return add(omega, dd_bar(phi));
}

EigenField endo_eigenvalues(const HermitianField& omega, const HermitianField& omega_phi) {
    require_same(*omega.mesh(), *omega_phi.mesh(), "endo_eigenvalues");
    const Mesh& mesh = *omega.mesh();
    const int n = omega.n();
    EigenField out;
    out.mesh = omega.mesh();
    out.n = n;
    out.data.assign(mesh.size() * n, 0.0);
    for (std::int64_t i = 0; i < mesh.size(); ++i) {
        if (!pencil_eigen(omega_phi.at(i), omega.at(i), out.data.data() + i * n, nullptr))
            throw GeometryError("metric is not positive definite at node " + std::to_string(i));
    }
    return out;
}

ScalarField laplacian(const HermitianField& omega, const ScalarField& phi) {
    require_same(*omega.mesh(), *phi.mesh, "laplacian");
    const Mesh& mesh = *phi.mesh;
    ScalarField out(phi.mesh, 0.0);
    HMat ginv;
    if (omega.uniform()) ginv = omega.at(0).inverse();
    for_each_active(mesh, [&](std::int64_t i) {
        const HMat a = dd_bar_at(phi, i);
        if (!omega.uniform()) ginv = omega.at(i).inverse();
        out.data[i] = (ginv.transpose().cwiseProduct(a)).sum().real();
    });
    return out;
}

double det_metric(const HermitianField& omega, std::int64_t idx) {
    return det_packed(omega.packed(idx), omega.n());
}

ScalarField volume_density(const HermitianField& omega) {
    const Mesh& mesh = *omega.mesh();
    ScalarField out(omega.mesh(), 0.0);
    if (omega.uniform()) {
        std::fill(out.data.begin(), out.data.end(), det_metric(omega, 0));
        return out;
    }
    for (std::int64_t i = 0; i < mesh.size(); ++i) out.data[i] = det_metric(omega, i);
    return out;
}

double integrate(const ScalarField& field, const HermitianField& omega) {
    require_same(*field.mesh, *omega.mesh(), "integrate");
    const Mesh& mesh = *field.mesh;
    long double s = 0.0L;
    if (omega.uniform()) {
        const double dg = det_metric(omega, 0);
        for_each_active(mesh, [&](std::int64_t i) { s += field.data[i]; });
        return static_cast<double>(s) * dg * mesh.cell_volume();
    }
    for_each_active(mesh, [&](std::int64_t i) {
        s += static_cast<long double>(field.data[i]) * det_metric(omega, i);
    });
    return static_cast<double>(s) * mesh.cell_volume();
}

double integrate_density(const ScalarField& field, const ScalarField& density) {
    require_same(*field.mesh, *density.mesh, "integrate");
    const Mesh& mesh = *field.mesh;
    long double s = 0.0L;
    for_each_active(mesh, [&](std::int64_t i) {
        s += static_cast<long double>(field.data[i]) * density.data[i];
    });
    return static_cast<double>(s) * mesh.cell_volume();
}

EntropyReport entropy(const ScalarField& F, const HermitianField& omega, double p) {
    if (!(p > 0.0)) throw ParameterError("entropy needs p > 0");
    require_same(*F.mesh, *omega.mesh(), "entropy");
    const Mesh& mesh = *F.mesh;
    const int n = mesh.n();
    ScalarField w(F.mesh, 0.0), e(F.mesh, 0.0);
    for_each_active(mesh, [&](std::int64_t i) {
        const double enf = std::exp(n * F.data[i]);
        e.data[i] = enf;
        w.data[i] = (1.0 + std::pow(std::abs(F.data[i]), p)) * enf;
    });
    EntropyReport r;
    r.p = p;
    r.value = integrate(w, omega);
    r.mass = integrate(e, omega);
    return r;
}

ScalarField sup_normalize(const ScalarField& phi) {
    const Mesh& mesh = *phi.mesh;
    double mx = -INFINITY;
    for (std::int64_t i = 0; i < mesh.size(); ++i)
        if (mesh.is_torus() || mesh.kind(i) != NodeKind::Exterior) mx = std::max(mx, phi.data[i]);
    ScalarField out = phi;
    for (auto& v : out.data) v -= mx;
    return out;
}

}  // namespace linfest::geom
