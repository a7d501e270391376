#pragma once

#include <cstdint>
#include <span>
#include <random>
#include <string>
#include <vector>

namespace linfest::cone {

// Largest dimension handled by the allocation-free evaluation paths.
inline constexpr int kMaxDim = 8;

using EigenTuple = std::vector<double>;

struct ConeSpec {
    enum class Kind { GammaK, PMA, Intersection };

    Kind kind = Kind::GammaK;
    int n = 1;
    int k = 1;  // k for Gamma_k, p for the PMA cone
    std::vector<ConeSpec> parts;

    static ConeSpec gamma(int n, int k);
    static ConeSpec pma(int n, int p);
    static ConeSpec intersection(std::vector<ConeSpec> parts);

    std::string describe() const;
};

enum class Family { MongeAmpere, Hessian, PMA, PositiveCombination };

struct OperatorSpec {
    Family family = Family::MongeAmpere;
    int n = 1;
    int k = 1;  // Hessian order or PMA p
    std::vector<double> weights;
    std::vector<OperatorSpec> parts;
    ConeSpec cone;
    double gamma = 0.0;

    static OperatorSpec monge_ampere(int n);
    static OperatorSpec hessian(int n, int k);
    static OperatorSpec pma(int n, int p);
    static OperatorSpec positive_combination(std::vector<double> weights,
                                             std::vector<OperatorSpec> parts);

    std::string describe() const;
};

double sigma(std::span<const double> lambda, int k);

bool in_cone(std::span<const double> lambda, const ConeSpec& cone);

// Every defining inequality exceeds 1e-10 * (1 + |lambda|).
bool strictly_inside(std::span<const double> lambda, const ConeSpec& cone);

// Empty when lambda is in the open cone.
std::string violated_condition(std::span<const double> lambda, const ConeSpec& cone);

double f_value(const OperatorSpec& op, std::span<const double> lambda);
EigenTuple f_gradient(const OperatorSpec& op, std::span<const double> lambda);

// Smallest defining quantity of the cone (sigma_j or lambda_I); positive inside.
double cone_margin(const double* lambda, const ConeSpec& cone);

// Unchecked hot path used by the solvers. lambda must lie in the cone.
// grad may be null. Returns f.
double evaluate(const OperatorSpec& op, const double* lambda, double* grad);

double structural_product(const OperatorSpec& op, std::span<const double> lambda);

struct GammaCertificate {
    double gamma = 0.0;
    bool exact = false;
    std::int64_t samples = 0;
    std::int64_t attempts = 0;
    std::uint64_t seed = 0;
};

GammaCertificate certify_gamma(const OperatorSpec& op, std::int64_t samples,
                               std::uint64_t seed);
double gamma_certificate(const OperatorSpec& op, std::int64_t samples, std::uint64_t seed);

// Deterministic random point strictly inside the cone, on the unit sphere.
EigenTuple sample_cone_point(const ConeSpec& cone, std::mt19937_64& rng);

}  // namespace linfest::cone
