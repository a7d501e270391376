#pragma once

#include <vector>

#include "linfest/field.hpp"
#include "linfest/hermitian_ops.hpp"
#include "linfest/sublevel.hpp"

namespace linfest::lab {

// (A gamma^{-1} (n+1)^n / n^{2n})^{1/(n+1)}
double epsilon_lemma2(double A, double gamma, int n);
// C(n, gamma) with eps = C(n, gamma) A^{1/(n+1)}.
double comparison_constant(double gamma, int n);

// max over interior nodes of (-u_s) - eps (-psi + shift)^e, e = n/(n+1) without shift and
// 2n/(2n+1) with it.
double comparison_residual(const geom::ScalarField& u_s, const geom::ScalarField& psi, double eps,
                           double shift = 0.0);

// Integral of exp(-alpha psi) over interior nodes.
double kolodziej_integral(const geom::ScalarField& psi, double alpha, const geom::HermitianField& omega);

// Largest alpha on the grid 0.1 * 2^j (j < max_steps) with integral <= bound for every member.
struct AlphaFit {
    double alpha = 0.0;
    std::vector<double> integrals;
};
AlphaFit fit_kolodziej_alpha(const std::vector<geom::ScalarField>& family, const geom::HermitianField& omega,
                             double bound, int max_steps = 12);
// Largest alpha with integral <= bound for one potential, by bisection on the monotone map.
double critical_alpha(const geom::ScalarField& psi, const geom::HermitianField& omega, double bound,
                      double hi = 1e3);

// eta(x) = log(1 + x)^p and its inverse.
double young_eta(double x, double p);
double young_eta_inverse(double y, double p);
// U eta(U) + V eta^{-1}(V) - U V
double young_gap(double U, double V, double p);

// (p - n) / (p n)
double delta0(double p, int n);

// A_s - C0 phi(s)^{1 + delta0}
double a_s_bound_check(const SublevelReport& report, double p, const geom::EntropyReport& entropy, double C0);
// Smallest C0 making every residual nonpositive; empty sublevels are skipped.
double fit_C0(const std::vector<SublevelReport>& reports, double p);

// t phi(s - t) - A_s, nonpositive in exact arithmetic.
double mass_inequality_residual(const SublevelReport& at_s, const SublevelReport& at_s_minus_t, double t);

}  // namespace linfest::lab
