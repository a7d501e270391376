#include "linfest/sublevel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "linfest/error.hpp"
#include "linfest/hermitian_ops.hpp"

namespace linfest::lab {

using geom::HermitianField;
using geom::Mesh;
using geom::MeshPtr;
using geom::NodeKind;
using geom::ScalarField;

namespace {

bool active(const Mesh& m, std::int64_t i) { return m.is_torus() || m.kind(i) != NodeKind::Exterior; }

// Displacement x - x0 with the periodic wrap on tori.
void displacement(const Mesh& m, std::int64_t i, const double* x0, double* z) {
    m.coordinates(i, z);
    for (int a = 0; a < m.dim(); ++a) {
        z[a] -= x0[a];
        if (m.is_torus()) {
            const double P = m.period();
            z[a] -= P * std::round(z[a] / P);
        }
    }
}

std::int64_t clamp_to_interior(const Mesh& X, const double* x) {
    const int d = X.dim();
    const double h = X.spacing();
    std::vector<double> dir(d);
    double r = 0.0;
    for (int a = 0; a < d; ++a) {
        dir[a] = x[a] - X.center()[a];
        r += dir[a] * dir[a];
    }
    r = std::sqrt(r);
    int mi[geom::kMaxRealDim];
    for (double rad = std::min(r, X.radius()); rad >= 0.0; rad -= 0.5 * h) {
        bool inside = true;
        for (int a = 0; a < d; ++a) {
            const double p = X.center()[a] + (r > 0.0 ? dir[a] / r * rad : 0.0);
            const int i = static_cast<int>(std::lround((p - X.center()[a]) / h)) + X.mid();
            if (i < 0 || i >= X.axis_size()) inside = false;
            mi[a] = i;
        }
        if (!inside) continue;
        const std::int64_t idx = X.linear_index(mi);
        if (X.kind(idx) == NodeKind::Interior) return idx;
    }
    throw GeometryError("ball source has no interior node to clamp to");
}

}  // namespace

Chart make_chart(const MeshPtr& source, std::int64_t x0, double r0) {
    if (!source) throw ParameterError("chart needs a source mesh");
    if (!(r0 > 0.0)) throw ParameterError("r0 must be positive");
    const Mesh& S = *source;
    if (x0 < 0 || x0 >= S.size() || !active(S, x0)) throw IndexError("chart centre is not an active node");
    const double h = S.spacing();
    const double cells = 4.0 * r0 / h;
    const int mb = static_cast<int>(std::lround(cells));
    if (std::abs(cells - mb) > 1e-9 * cells || mb % 2 != 0 || mb < 8)
        throw ParameterError("4 r0 / h must be an even integer >= 8");
    if (S.is_torus() && 4.0 * r0 > S.period() + 1e-12)
        throw ParameterError("chart ball does not fit in the torus");
    Chart c;
    c.r0 = r0;
    c.source_mesh = source;
    c.x0_source = x0;
    c.mesh = Mesh::ball(S.n(), mb, 2.0 * r0);
    const Mesh& B = *c.mesh;
    const int d = B.dim();
    int mi0[geom::kMaxRealDim], mi[geom::kMaxRealDim], q[geom::kMaxRealDim];
    S.multi_index(x0, mi0);
    for (int a = 0; a < d; ++a) mi[a] = B.mid();
    c.x0 = B.linear_index(mi);
    c.source.assign(B.size(), -1);
    std::vector<double> xs(d), x0c(d);
    S.coordinates(x0, x0c.data());
    for (std::int64_t i = 0; i < B.size(); ++i) {
        B.multi_index(i, mi);
        bool in_box = true;
        for (int a = 0; a < d; ++a) {
            q[a] = mi0[a] + (mi[a] - B.mid());
            if (S.is_torus()) {
                q[a] %= S.m();
                if (q[a] < 0) q[a] += S.m();
            } else if (q[a] < 0 || q[a] >= S.axis_size()) {
                in_box = false;
            }
        }
        if (in_box) {
            const std::int64_t j = S.linear_index(q);
            if (S.kind(j) == NodeKind::Interior) {
                c.source[i] = j;
                continue;
            }
        }
        for (int a = 0; a < d; ++a) xs[a] = x0c[a] + (mi[a] - B.mid()) * h;
        c.source[i] = clamp_to_interior(S, xs.data());
    }
    return c;
}

ScalarField pull_back(const Chart& chart, const ScalarField& f) {
    if (!f.mesh || !f.mesh->same_as(*chart.source_mesh)) throw ParameterError("field does not live on the chart source");
    ScalarField out(chart.mesh, 0.0);
    for (std::int64_t i = 0; i < chart.mesh->size(); ++i) out[i] = f[chart.source[i]];
    return out;
}

HermitianField pull_back(const Chart& chart, const HermitianField& f) {
    if (!f.mesh() || !f.mesh()->same_as(*chart.source_mesh)) throw ParameterError("field does not live on the chart source");
    if (f.uniform()) return HermitianField::constant(chart.mesh, f.at(0));
    HermitianField out(chart.mesh, false);
    const int nn = f.n() * f.n();
    for (std::int64_t i = 0; i < chart.mesh->size(); ++i)
        std::copy_n(f.packed(chart.source[i]), nn, out.packed(i));
    return out;
}

std::int64_t argmin_node(const ScalarField& phi) {
    const Mesh& m = *phi.mesh;
    std::int64_t best = -1;
    double v = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < m.size(); ++i) {
        if (!m.is_torus() && m.kind(i) != NodeKind::Interior) continue;
        if (phi[i] < v) {
            v = phi[i];
            best = i;
        }
    }
    if (best < 0) throw GeometryError("no active nodes");
    return best;
}

ScalarField build_u_s(const ScalarField& phi, std::int64_t x0, double s, double eps_prime) {
    const Mesh& m = *phi.mesh;
    if (x0 < 0 || x0 >= m.size() || !active(m, x0)) throw IndexError("x0 is not an active node");
    if (!(s > 0.0)) throw ParameterError("s must be positive");
    if (!(eps_prime > 0.0)) throw ParameterError("eps' must be positive");
    const double p0 = phi[x0];
    for (std::int64_t i = 0; i < m.size(); ++i)
        if (active(m, i) && phi[i] < p0) throw PreconditionError("x0 is not a minimum of phi on the chart");
    const int d = m.dim();
    std::vector<double> x0c(d), z(d);
    m.coordinates(x0, x0c.data());
    ScalarField u(phi.mesh, 0.0);
    for (std::int64_t i = 0; i < m.size(); ++i) {
        displacement(m, i, x0c.data(), z.data());
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) r2 += z[a] * z[a];
        u[i] = phi[i] - p0 + eps_prime * r2 - s;
    }
    u[x0] = -s;
    return u;
}

double tau_k(double x, double k) {
    const double ik = 1.0 / k;
    if (x >= 0.0) return 0.5 * (x + std::hypot(x, ik));
    // Cancellation-free form for negative x.
    return 0.5 * ik * ik / (std::hypot(x, ik) - x);
}

SublevelReport sublevel_masses(const ScalarField& u_s, const ScalarField& F, const HermitianField& omega,
                               double k) {
    if (!(k >= 1.0)) throw ParameterError("smoothing index k must be >= 1");
    const Mesh& m = *u_s.mesh;
    if (!F.mesh->same_as(m) || !omega.mesh()->same_as(m)) throw ParameterError("fields live on different meshes");
    const int n = m.n();
    SublevelReport r;
    r.k = k;
    r.u_s = u_s;
    r.mask.assign(m.size(), 0);
    long double a_s = 0.0L, phi = 0.0L, a_sk = 0.0L;
    double best = std::numeric_limits<double>::infinity();
    geom::for_each_active(m, [&](std::int64_t i) {
        const long double w = std::exp(n * F[i]) * geom::det_metric(omega, i);
        const double v = -u_s[i];
        if (v > 0.0) {
            r.mask[i] = 1;
            ++r.mask_nodes;
            a_s += v * w;
            phi += w;
        }
        a_sk += tau_k(v, k) * w;
        if (u_s[i] < best) {
            best = u_s[i];
            r.x0 = i;
        }
    });
    const double cell = m.cell_volume();
    r.A_s = static_cast<double>(a_s) * cell;
    r.phi_of_s = static_cast<double>(phi) * cell;
    r.A_sk = static_cast<double>(a_sk) * cell;
    r.s = -best;
    return r;
}

pde::DirichletProblem auxiliary_problem(const SublevelReport& report, const ScalarField& F,
                                        const HermitianField& omega) {
    const MeshPtr& mesh = report.u_s.mesh;
    if (mesh->is_torus()) throw ParameterError("auxiliary problem lives on a ball");
    if (!(report.A_sk > 0.0)) throw DomainError("A_{s,k} must be positive");
    const int n = mesh->n();
    ScalarField rho(mesh, 0.0);
    for (std::int64_t i = 0; i < mesh->size(); ++i) {
        if (mesh->kind(i) == NodeKind::Exterior) continue;
        rho[i] = tau_k(-report.u_s[i], report.k) * std::exp(n * F[i]) * geom::det_metric(omega, i) / report.A_sk;
    }
    return pde::DirichletProblem(std::move(rho));
}

std::vector<double> s_grid(double s0, int count) {
    if (!(s0 > 0.0) || count < 2) throw ParameterError("s grid needs s0 > 0 and count >= 2");
    std::vector<double> s(count);
    for (int j = 0; j < count; ++j) s[j] = s0 * std::pow(10.0, -3.0 * (1.0 - double(j) / (count - 1)));
    s.back() = s0;
    return s;
}

}  // namespace linfest::lab
