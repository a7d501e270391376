#include "linfest/degiorgi.hpp"

#include <algorithm>
#include <cmath>

#include "linfest/error.hpp"

namespace linfest::lab {

double degiorgi_c0(double s0, double C0, double delta0) {
    if (!(s0 > 0.0) || !(C0 > 0.0) || !(delta0 > 0.0)) throw ParameterError("c0 needs s0, C0, delta0 > 0");
    return std::pow(s0 * (1.0 - std::exp2(-delta0)) / (2.0 * C0), 1.0 / delta0);
}

double functional_constant(const PhiFunction& phi_fn, double s0, double delta0, int samples) {
    if (samples < 2) throw ParameterError("need at least two samples");
    std::vector<double> grid(samples), val(samples);
    // Geometric grid so the small-s region is resolved.
    for (int i = 0; i < samples; ++i) {
        grid[i] = s0 * std::pow(1e-4, 1.0 - double(i) / (samples - 1));
        val[i] = phi_fn(grid[i]);
    }
    double c = 0.0;
    for (int i = 0; i < samples; ++i) {
        if (!(val[i] > 0.0)) continue;
        const double denom = std::pow(val[i], 1.0 + delta0);
        for (int j = 0; j < i; ++j) c = std::max(c, (grid[i] - grid[j]) * val[j] / denom);
        // linear t-grid inside (0, s) picks up the interior maximiser
        for (int q = 1; q < samples; ++q) {
            const double t = grid[i] * q / samples;
            c = std::max(c, t * phi_fn(grid[i] - t) / denom);
        }
    }
    return c;
}

void check_monotone(const PhiFunction& phi_fn, double s0, int samples) {
    double prev = -1.0;
    for (int i = 0; i < samples; ++i) {
        const double s = s0 * std::pow(1e-6, 1.0 - double(i) / (samples - 1));
        const double v = phi_fn(s);
        if (!(v > 0.0)) throw PreconditionError("phi must be positive on (0, s0]");
        if (v < prev) throw PreconditionError("phi samples are not monotone nondecreasing");
        prev = v;
    }
}

IterationTrace degiorgi_iterate(const PhiFunction& phi_fn, double s0, double C0, double delta0, int max_levels) {
    check_monotone(phi_fn, s0);
    IterationTrace tr;
    tr.C0 = C0;
    tr.delta0 = delta0;
    tr.c0 = degiorgi_c0(s0, C0, delta0);
    const double p0 = phi_fn(s0);
    tr.s0_bound = 2.0 * C0 * std::pow(p0, delta0) / (1.0 - std::exp2(-delta0));
    tr.s_sequence.push_back(s0);
    tr.phi_values.push_back(p0);
    tr.measured_phi.push_back(p0);
    while (static_cast<int>(tr.s_sequence.size()) < max_levels && tr.s_sequence.back() >= 1e-6 * s0) {
        const double sj = tr.s_sequence.back();
        const double target = 0.5 * tr.phi_values.back();
        double lo = 0.0, hi = sj;
        if (phi_fn(std::ldexp(sj, -60)) > target) {
            tr.floored = true;
            break;
        }
        lo = std::ldexp(sj, -60);
        while (true) {
            const double mid = 0.5 * (lo + hi);
            if (!(mid > lo && mid < hi)) break;
            (phi_fn(mid) <= target ? lo : hi) = mid;
        }
        tr.s_sequence.push_back(lo);
        tr.phi_values.push_back(target);
        tr.measured_phi.push_back(phi_fn(lo));
    }
    return tr;
}

}  // namespace linfest::lab
