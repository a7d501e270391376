#pragma once

#include <string>
#include <vector>

#include "linfest/degiorgi.hpp"
#include "linfest/field.hpp"
#include "linfest/hermitian_ops.hpp"

namespace linfest::lab {

// sup_{u>0} u (exp(u^{1/p}) - 1) / (1 + e^u), finite for p > 1.
double young_tail_constant(double p);

struct Certificate {
    // value overflows to +inf when log_value exceeds the double range.
    double value = 0.0;
    double log_value = 0.0;
    // -phi(x0) is below the threshold max(2, 1 + s0)
    bool trivial = false;
    double threshold = 2.0;
    double phi_s0 = 0.0;
    double K1 = 0.0;
    double K2 = 0.0;
    double tail_constant = 0.0;
    double log_T = 0.0;
};

// Upper bound for -min phi from
//   (1/2) log T * phi(s0) <= 2^{p-1} n^p E + C'' (Vol + ||phi||_1 T^{-1/2}),   T = -phi(x0) - s0,
// using phi(s0) = trace.phi_values[0] and s0 = trace.s_sequence[0].
// F is the forcing seen by the measure, e^{nF} omega^n.
Certificate certify_min(const geom::ScalarField& phi, const geom::ScalarField& F,
                        const geom::HermitianField& omega, double p, const geom::EntropyReport& entropy,
                        const IterationTrace& trace);
double min_bound_certificate(const geom::ScalarField& phi, const geom::ScalarField& F,
                             const geom::HermitianField& omega, double p,
                             const geom::EntropyReport& entropy, const IterationTrace& trace);
// Same chain with the floor c0 in place of the measured phi(s0).
double min_bound_certificate_c0(const geom::ScalarField& phi, const geom::ScalarField& F,
                                const geom::HermitianField& omega, double p,
                                const geom::EntropyReport& entropy, const IterationTrace& trace);

struct VolumeInstance {
    geom::ScalarField phi;
    geom::ScalarField F;
    geom::HermitianField omega;
};

struct VolumeFloor {
    double min_mass = 0.0;
    double entropy_bound = 0.0;
    std::vector<double> masses;
    // (index, reason) of instances with lambda[h_phi] outside the positive cone
    std::vector<std::pair<std::size_t, std::string>> rejected;
};

VolumeFloor volume_floor_experiment(const std::vector<VolumeInstance>& instances, double p);

}  // namespace linfest::lab
