#pragma once

// Reference formulas written from the definitions, independent of the library code paths.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Sum over all k-subsets, by bitmask enumeration.
inline double sigma(const std::vector<double>& l, int k) {
    const int n = static_cast<int>(l.size());
    if (k == 0) return 1.0;
    double s = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        double prod = 1.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) prod *= l[i];
        s += prod;
    }
    return s;
}

inline bool in_gamma(const std::vector<double>& l, int k) {
    for (int j = 1; j <= k; ++j)
        if (!(sigma(l, j) > 0.0)) return false;
    return true;
}

// Every p-fold partial sum positive.
inline bool in_pma(const std::vector<double>& l, int p) {
    const int n = static_cast<int>(l.size());
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != p) continue;
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) s += l[i];
        if (!(s > 0.0)) return false;
    }
    return true;
}

inline double monge_ampere(const std::vector<double>& l) {
    double prod = 1.0;
    for (double x : l) prod *= x;
    return std::pow(prod, 1.0 / l.size());
}

inline double hessian(const std::vector<double>& l, int k) { return std::pow(sigma(l, k), 1.0 / k); }

inline double pma(const std::vector<double>& l, int p) {
    const int n = static_cast<int>(l.size());
    double prod = 1.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != p) continue;
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) s += l[i];
        prod *= s;
    }
    return std::pow(prod, 1.0 / binomial(n, p));
}

// Fourth-order central difference.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> l, double step) {
    std::vector<double> g(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) {
        const double x = l[i];
        auto at = [&](double d) {
            l[i] = x + d;
            const double v = f(l);
            l[i] = x;
            return v;
        };
        g[i] = (8.0 * (at(step) - at(-step)) - (at(2 * step) - at(-2 * step))) / (12.0 * step);
    }
    return g;
}

// Ridders' extrapolated central difference; h0 must keep x +- h0 inside the domain.
inline std::vector<double> ridders_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> l, double h0) {
    constexpr int kTab = 10;
    constexpr double kCon = 1.4, kCon2 = kCon * kCon;
    std::vector<double> g(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) {
        const double x = l[i];
        auto central = [&](double h) {
            l[i] = x + h;
            const double up = f(l);
            l[i] = x - h;
            const double dn = f(l);
            l[i] = x;
            return (up - dn) / (2.0 * h);
        };
        double a[kTab][kTab];
        double h = h0, err = 1e300;
        a[0][0] = central(h);
        g[i] = a[0][0];
        for (int k = 1; k < kTab; ++k) {
            h /= kCon;
            a[0][k] = central(h);
            double fac = kCon2;
            for (int j = 1; j <= k; ++j) {
                a[j][k] = (a[j - 1][k] * fac - a[j - 1][k - 1]) / (fac - 1.0);
                fac *= kCon2;
                const double e = std::max(std::abs(a[j][k] - a[j - 1][k]), std::abs(a[j][k] - a[j - 1][k - 1]));
                if (e <= err) {
                    err = e;
                    g[i] = a[j][k];
                }
            }
            if (std::abs(a[k][k] - a[k - 1][k - 1]) >= 2.0 * err) break;
        }
    }
    return g;
}

// phi_{j kbar} of the real quadratic x^T H x / 2, axes ordered (x1, y1, ..., xn, yn).
inline Eigen::MatrixXcd complex_hessian(const Eigen::MatrixXd& H) {
    const int n = static_cast<int>(H.rows()) / 2;
    Eigen::MatrixXcd A(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const double re = H(2 * j, 2 * k) + H(2 * j + 1, 2 * k + 1);
            const double im = H(2 * j, 2 * k + 1) - H(2 * j + 1, 2 * k);
            A(j, k) = std::complex<double>(0.25 * re, 0.25 * im);
        }
    return A;
}

// det(i ddbar psi) = a^n for psi = a (|z|^2 - R^2).
inline double radial_cma(double a, double R, double r2) { return a * (r2 - R * R); }

inline double young_gap(double U, double V, double p) {
    const double eta = std::pow(std::log1p(U), p);
    const double eta_inv = std::expm1(std::pow(V, 1.0 / p));
    return U * eta + V * eta_inv - U * V;
}

// Halving trace of (s/s0)^{1/delta0}: s_j = s0 2^{-j delta0}.
inline double power_trace_s(double s0, double delta0, int j) { return s0 * std::pow(2.0, -j * delta0); }

// sup_{0<t<s<=s0} t phi(s-t) / phi(s)^{1+d} for phi = (s/s0)^{1/d}:
// with x = t/s the ratio is s0 x (1-x)^{1/d}, maximised at x = d/(1+d).
inline double power_functional_constant(double s0, double d) {
    const double x = d / (1.0 + d);
    return s0 * x * std::pow(1.0 - x, 1.0 / d);
}

// Theta at the identity point, g = I: Theta = (1/n) I for the normalised Monge-Ampere operator,
// and (1/3) I for sqrt(sigma_2) with n = 3.
inline double theta_det_identity_ma(int n) { return std::pow(static_cast<double>(n), -n); }
inline double theta_det_identity_hessian2_n3() { return 1.0 / 27.0; }
inline double gamma_hessian2_n3_identity() { return 1.0 / (3.0 * std::sqrt(3.0)); }

inline double unit_ball_volume(int d) { return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0); }

}  // namespace oracle
