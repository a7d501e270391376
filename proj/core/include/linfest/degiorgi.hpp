#pragma once

#include <functional>
#include <vector>

namespace linfest::lab {

using PhiFunction = std::function<double(double)>;

struct IterationTrace {
    std::vector<double> s_sequence;
    // phi_values[j] = 2^{-j} phi_values[0]
    std::vector<double> phi_values;
    // phi_fn evaluated at each s_j
    std::vector<double> measured_phi;
    double C0 = 0.0;
    double delta0 = 0.0;
    double c0 = 0.0;
    // 2 C0 phi(s0)^delta0 / (1 - 2^{-delta0}), an upper bound for s0 under the functional inequality
    double s0_bound = 0.0;
    // Set when phi_fn stays above the halving target all the way down to 0.
    bool floored = false;
};

// (s0 (1 - 2^{-delta0}) / (2 C0))^{1/delta0}
double degiorgi_c0(double s0, double C0, double delta0);

// sup of t phi(s - t) / phi(s)^{1 + delta0} over a (samples x samples) grid of 0 < t < s <= s0.
double functional_constant(const PhiFunction& phi_fn, double s0, double delta0, int samples = 400);

// Throws PreconditionError on a decreasing pair of samples or a nonpositive value.
void check_monotone(const PhiFunction& phi_fn, double s0, int samples = 256);

IterationTrace degiorgi_iterate(const PhiFunction& phi_fn, double s0, double C0, double delta0,
                                int max_levels = 60);

}  // namespace linfest::lab
