#include "linfest/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "linfest/error.hpp"
#include "linfest/sublevel.hpp"

namespace linfest::lab {

using geom::ScalarField;

double young_tail_constant(double p) {
    if (!(p > 1.0)) throw ParameterError("tail constant needs p > 1");
    auto g = [p](double u) { return u * std::expm1(std::pow(u, 1.0 / p)) / (1.0 + std::exp(u)); };
    // Coarse log scan, then golden-section refinement around the best sample.
    double best_u = 1.0, best = g(1.0);
    for (int i = 0; i <= 4000; ++i) {
        const double u = std::pow(10.0, -6.0 + 9.0 * i / 4000.0);
        const double v = g(u);
        if (v > best) {
            best = v;
            best_u = u;
        }
    }
    double a = best_u / 1.01, b = best_u * 1.01;
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 100; ++it) {
        const double c = b - r * (b - a), d = a + r * (b - a);
        (g(c) > g(d) ? b : a) = g(c) > g(d) ? d : c;
    }
    best = std::max(best, g(0.5 * (a + b)));
    // Relative safety margin against the scan missing the peak.
    return best * (1.0 + 1e-9);
}

namespace {

double l1_norm(const ScalarField& phi, const geom::HermitianField& omega) {
    ScalarField a(phi.mesh, 0.0);
    for (std::int64_t i = 0; i < a.size(); ++i) a[i] = std::abs(phi[i]);
    return geom::integrate(a, omega);
}

// Root of (1/2) u q = K1 + K2 e^{-u/2}; left side increasing, right side decreasing.
double solve_log_T(double q, double K1, double K2) {
    auto h = [&](double u) { return 0.5 * u * q - K1 - K2 * std::exp(-0.5 * u); };
    double lo = 0.0, hi = 1.0;
    while (h(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e300) throw NumericError("certificate root is unbounded");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        (h(mid) < 0.0 ? lo : hi) = mid;
    }
    return hi;
}

Certificate chain(const ScalarField& phi, const geom::HermitianField& omega, double p,
                  const geom::EntropyReport& entropy, double s0, double floor) {
    if (!(p > 1.0)) throw ParameterError("certificate needs p > 1");
    if (!(floor > 0.0)) throw PreconditionError("phi(s0) floor must be positive");
    if (!(s0 > 0.0)) throw ParameterError("s0 must be positive");
    const int n = phi.mesh->n();
    Certificate c;
    c.threshold = std::max(2.0, 1.0 + s0);
    c.phi_s0 = floor;
    const double depth = -phi[argmin_node(phi)];
    if (depth < c.threshold) {
        c.trivial = true;
        c.value = c.threshold;
        c.log_value = std::log(c.threshold);
        return c;
    }
    c.tail_constant = young_tail_constant(p);
    const double vol = geom::integrate(ScalarField(phi.mesh, 1.0), omega);
    c.K1 = std::pow(2.0, p - 1.0) * std::pow(double(n), p) * entropy.value + c.tail_constant * vol;
    c.K2 = c.tail_constant * l1_norm(phi, omega);
    c.log_T = solve_log_T(floor, c.K1, c.K2);
    c.log_value = std::max(std::log(c.threshold), c.log_T + std::log1p(s0 * std::exp(-c.log_T)));
    c.value = std::max(c.threshold, s0 + std::exp(c.log_T));
    return c;
}

void check_inputs(const ScalarField& phi, const ScalarField& F, const geom::HermitianField& omega,
                  const IterationTrace& trace) {
    if (!F.mesh->same_as(*phi.mesh) || !omega.mesh()->same_as(*phi.mesh))
        throw ParameterError("fields live on different meshes");
    if (trace.s_sequence.empty() || trace.phi_values.empty()) throw PreconditionError("empty iteration trace");
    if (!(trace.c0 > 0.0)) throw PreconditionError("iteration trace has no positive floor");
}

}  // namespace

Certificate certify_min(const ScalarField& phi, const ScalarField& F, const geom::HermitianField& omega,
                        double p, const geom::EntropyReport& entropy, const IterationTrace& trace) {
    check_inputs(phi, F, omega, trace);
    return chain(phi, omega, p, entropy, trace.s_sequence.front(), trace.phi_values.front());
}

double min_bound_certificate(const ScalarField& phi, const ScalarField& F, const geom::HermitianField& omega,
                             double p, const geom::EntropyReport& entropy, const IterationTrace& trace) {
    return certify_min(phi, F, omega, p, entropy, trace).value;
}

double min_bound_certificate_c0(const ScalarField& phi, const ScalarField& F,
                                const geom::HermitianField& omega, double p,
                                const geom::EntropyReport& entropy, const IterationTrace& trace) {
    check_inputs(phi, F, omega, trace);
    return chain(phi, omega, p, entropy, trace.s_sequence.front(), trace.c0).value;
}

VolumeFloor volume_floor_experiment(const std::vector<VolumeInstance>& instances, double p) {
    VolumeFloor out;
    out.min_mass = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < instances.size(); ++k) {
        const VolumeInstance& in = instances[k];
        const geom::EigenField lam = geom::endo_eigenvalues(in.omega, geom::omega_phi(in.omega, in.phi));
        const geom::Mesh& m = *in.phi.mesh;
        bool ok = true;
        geom::for_each_active(m, [&](std::int64_t i) {
            if (!(lam.at(i)[0] > 0.0)) ok = false;
        });
        if (!ok) {
            out.rejected.emplace_back(k, "lambda[h_phi] leaves the positive cone");
            continue;
        }
        const geom::EntropyReport e = geom::entropy(in.F, in.omega, p);
        out.masses.push_back(e.mass);
        out.min_mass = std::min(out.min_mass, e.mass);
        out.entropy_bound = std::max(out.entropy_bound, e.value);
    }
    if (out.masses.empty()) out.min_mass = 0.0;
    return out;
}

}  // namespace linfest::lab
