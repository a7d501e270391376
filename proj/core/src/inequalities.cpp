#include "linfest/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "linfest/error.hpp"

namespace linfest::lab {

using geom::ScalarField;

double epsilon_lemma2(double A, double gamma, int n) {
    if (!(A > 0.0) || !(gamma > 0.0) || n < 1) throw ParameterError("epsilon needs A > 0, gamma > 0, n >= 1");
    return comparison_constant(gamma, n) * std::pow(A, 1.0 / (n + 1));
}

double comparison_constant(double gamma, int n) {
    if (!(gamma > 0.0) || n < 1) throw ParameterError("comparison constant needs gamma > 0, n >= 1");
    const double v = std::pow(n + 1.0, n) / (gamma * std::pow(double(n), 2.0 * n));
    return std::pow(v, 1.0 / (n + 1));
}

double comparison_residual(const ScalarField& u_s, const ScalarField& psi, double eps, double shift) {
    const geom::Mesh& m = *u_s.mesh;
    if (!psi.mesh->same_as(m)) throw ParameterError("u_s and psi live on different meshes");
    if (!(shift >= 0.0)) throw ParameterError("shift must be nonnegative");
    const int n = m.n();
    const double e = shift > 0.0 ? 2.0 * n / (2.0 * n + 1.0) : double(n) / (n + 1.0);
    double worst = -std::numeric_limits<double>::infinity();
    geom::for_each_active(m, [&](std::int64_t i) {
        const double base = std::max(-psi[i] + shift, 0.0);
        worst = std::max(worst, -u_s[i] - eps * std::pow(base, e));
    });
    return worst;
}

double kolodziej_integral(const ScalarField& psi, double alpha, const geom::HermitianField& omega) {
    ScalarField w(psi.mesh, 0.0);
    for (std::int64_t i = 0; i < w.size(); ++i) w[i] = std::exp(-alpha * psi[i]);
    return geom::integrate(w, omega);
}

AlphaFit fit_kolodziej_alpha(const std::vector<ScalarField>& family, const geom::HermitianField& omega,
                             double bound, int max_steps) {
    if (family.empty()) throw ParameterError("empty potential family");
    AlphaFit fit;
    for (int j = 0; j < max_steps; ++j) {
        const double a = 0.1 * std::ldexp(1.0, j);
        std::vector<double> vals;
        bool ok = true;
        for (const auto& psi : family) {
            vals.push_back(kolodziej_integral(psi, a, omega));
            if (!(vals.back() <= bound)) ok = false;
        }
        if (!ok) break;
        fit.alpha = a;
        fit.integrals = std::move(vals);
    }
    return fit;
}

double critical_alpha(const ScalarField& psi, const geom::HermitianField& omega, double bound, double hi) {
    if (!(kolodziej_integral(psi, 0.0, omega) <= bound)) return 0.0;
    if (kolodziej_integral(psi, hi, omega) <= bound) return hi;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (kolodziej_integral(psi, mid, omega) <= bound ? lo : hi) = mid;
    }
    return lo;
}

double young_eta(double x, double p) { return std::pow(std::log1p(x), p); }

double young_eta_inverse(double y, double p) { return std::expm1(std::pow(y, 1.0 / p)); }

double young_gap(double U, double V, double p) {
    if (!(p > 0.0)) throw ParameterError("Young exponent must be positive");
    if (U < 0.0 || V < 0.0) throw ParameterError("Young inputs must be nonnegative");
    return U * young_eta(U, p) + V * young_eta_inverse(V, p) - U * V;
}

double delta0(double p, int n) {
    if (!(p > n)) throw ParameterError("need p > n");
    return (p - n) / (p * n);
}

double a_s_bound_check(const SublevelReport& report, double p, const geom::EntropyReport&, double C0) {
    const int n = report.u_s.mesh->n();
    const double d0 = delta0(p, n);
    if (report.A_s == 0.0 && report.phi_of_s == 0.0) return 0.0;
    return report.A_s - C0 * std::pow(report.phi_of_s, 1.0 + d0);
}

double fit_C0(const std::vector<SublevelReport>& reports, double p) {
    double c = 0.0;
    for (const auto& r : reports) {
        if (!(r.phi_of_s > 0.0)) continue;
        const double d0 = delta0(p, r.u_s.mesh->n());
        c = std::max(c, r.A_s / std::pow(r.phi_of_s, 1.0 + d0));
    }
    return c;
}

double mass_inequality_residual(const SublevelReport& at_s, const SublevelReport& at_s_minus_t, double t) {
    if (!(t > 0.0)) throw ParameterError("t must be positive");
    return t * at_s_minus_t.phi_of_s - at_s.A_s;
}

}  // namespace linfest::lab
