#include "linfest/cone.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "linfest/error.hpp"

namespace linfest::cone {

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

// Elementary symmetric polynomials e_0..e_k of lambda, skipping index `skip`.
void esym(const double* lambda, int n, int k, int skip, double* e) {
    e[0] = 1.0;
    for (int j = 1; j <= k; ++j) e[j] = 0.0;
    int seen = 0;
    for (int i = 0; i < n; ++i) {
        if (i == skip) continue;
        ++seen;
        for (int j = std::min(seen, k); j >= 1; --j) e[j] += lambda[i] * e[j - 1];
    }
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

template <class Fn>
void for_each_subset(int n, int p, Fn&& fn) {
    for (unsigned mask = 0; mask < (1u << n); ++mask)
        if (std::popcount(mask) == p) fn(mask);
}

double subset_sum(const double* lambda, int n, unsigned mask) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) s += lambda[i];
    return s;
}

// Smallest defining quantity of the cone, and a label for it.
double cone_margin(const double* lambda, const ConeSpec& cone, std::string* label) {
    double worst = INFINITY;
    switch (cone.kind) {
        case ConeSpec::Kind::GammaK: {
            std::array<double, kMaxDim + 1> e{};
            esym(lambda, cone.n, cone.k, -1, e.data());
            for (int j = 1; j <= cone.k; ++j) {
                if (e[j] < worst) {
                    worst = e[j];
                    if (label) *label = "sigma_" + std::to_string(j) + " <= 0";
                }
            }
            break;
        }
        case ConeSpec::Kind::PMA:
            for_each_subset(cone.n, cone.k, [&](unsigned mask) {
                double s = subset_sum(lambda, cone.n, mask);
                if (s < worst) {
                    worst = s;
                    if (label) {
                        std::ostringstream os;
                        os << "lambda_I <= 0 for I = {";
                        bool first = true;
                        for (int i = 0; i < cone.n; ++i)
                            if (mask & (1u << i)) {
                                os << (first ? "" : ",") << i + 1;
                                first = false;
                            }
                        os << "}";
                        *label = os.str();
                    }
                }
            });
            break;
        case ConeSpec::Kind::Intersection:
            for (const auto& part : cone.parts) {
                std::string sub;
                double m = cone_margin(lambda, part, label ? &sub : nullptr);
                if (m < worst) {
                    worst = m;
                    if (label) *label = sub;
                }
            }
            break;
    }
    return worst;
}

void check_tuple(std::span<const double> lambda, int n) {
    if (static_cast<int>(lambda.size()) != n)
        throw ParameterError("eigen tuple has length " + std::to_string(lambda.size()) +
                             ", expected " + std::to_string(n));
    for (double x : lambda)
        if (!std::isfinite(x)) throw ParameterError("eigen tuple has a non-finite entry");
}

void check_dim(int n) {
    if (n < 1 || n > kMaxDim)
        throw ParameterError("dimension must be in [1, " + std::to_string(kMaxDim) + "]");
}

}  // namespace

ConeSpec ConeSpec::gamma(int n, int k) {
    check_dim(n);
    if (k < 1 || k > n) throw ParameterError("Gamma_k requires 1 <= k <= n");
    ConeSpec c;
    c.kind = Kind::GammaK;
    c.n = n;
    c.k = k;
    return c;
}

ConeSpec ConeSpec::pma(int n, int p) {
    check_dim(n);
    if (p < 1 || p > n) throw ParameterError("PMA cone requires 1 <= p <= n");
    ConeSpec c;
    c.kind = Kind::PMA;
    c.n = n;
    c.k = p;
    return c;
}

ConeSpec ConeSpec::intersection(std::vector<ConeSpec> parts) {
    if (parts.empty()) throw ParameterError("empty cone intersection");
    for (const auto& p : parts)
        if (p.n != parts.front().n) throw ParameterError("cone intersection mixes dimensions");
    ConeSpec c;
    c.kind = Kind::Intersection;
    c.n = parts.front().n;
    c.parts = std::move(parts);
    return c;
}

std::string ConeSpec::describe() const {
    switch (kind) {
        case Kind::GammaK: return "Gamma_" + std::to_string(k) + "(n=" + std::to_string(n) + ")";
        case Kind::PMA: return "PMA_" + std::to_string(k) + "(n=" + std::to_string(n) + ")";
        case Kind::Intersection: {
            std::string s = "Intersection[";
            for (std::size_t i = 0; i < parts.size(); ++i)
                s += (i ? "," : "") + parts[i].describe();
            return s + "]";
        }
    }
    return {};
}

OperatorSpec OperatorSpec::monge_ampere(int n) {
    check_dim(n);
    OperatorSpec op;
    op.family = Family::MongeAmpere;
    op.n = n;
    op.k = n;
    op.cone = ConeSpec::gamma(n, n);
    op.gamma = std::pow(static_cast<double>(n), -n);
    return op;
}

OperatorSpec OperatorSpec::hessian(int n, int k) {
    OperatorSpec op;
    op.family = Family::Hessian;
    op.n = n;
    op.k = k;
    op.cone = ConeSpec::gamma(n, k);
    op.gamma = certify_gamma(op, 20000, 0x5eed).gamma;
    return op;
}

OperatorSpec OperatorSpec::pma(int n, int p) {
    OperatorSpec op;
    op.family = Family::PMA;
    op.n = n;
    op.k = p;
    op.cone = ConeSpec::pma(n, p);
    op.gamma = certify_gamma(op, 20000, 0x5eed).gamma;
    return op;
}

OperatorSpec OperatorSpec::positive_combination(std::vector<double> weights,
                                                std::vector<OperatorSpec> parts) {
    if (parts.empty() || weights.size() != parts.size())
        throw ParameterError("positive combination needs one weight per part");
    std::vector<ConeSpec> cones;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
            throw ParameterError("positive combination weights must be positive");
        if (parts[i].n != parts.front().n)
            throw ParameterError("positive combination mixes dimensions");
        cones.push_back(parts[i].cone);
    }
    OperatorSpec op;
    op.family = Family::PositiveCombination;
    op.n = parts.front().n;
    op.k = 0;
    op.weights = std::move(weights);
    op.parts = std::move(parts);
    op.cone = cones.size() == 1 ? cones.front() : ConeSpec::intersection(std::move(cones));
    op.gamma = certify_gamma(op, 20000, 0x5eed).gamma;
    return op;
}

std::string OperatorSpec::describe() const {
    switch (family) {
        case Family::MongeAmpere: return "MongeAmpere(n=" + std::to_string(n) + ")";
        case Family::Hessian:
            return "Hessian(k=" + std::to_string(k) + ",n=" + std::to_string(n) + ")";
        case Family::PMA: return "PMA(p=" + std::to_string(k) + ",n=" + std::to_string(n) + ")";
        case Family::PositiveCombination: {
            std::ostringstream os;
            os << "PositiveCombination[";
            for (std::size_t i = 0; i < parts.size(); ++i)
                os << (i ? "," : "") << weights[i] << "*" << parts[i].describe();
            os << "]";
            return os.str();
        }
    }
    return {};
}

double sigma(std::span<const double> lambda, int k) {
    const int n = static_cast<int>(lambda.size());
    if (n < 1) throw ParameterError("sigma of an empty tuple");
    if (k < 1 || k > n) throw ParameterError("sigma_k requires 1 <= k <= n");
    std::vector<double> e(k + 1);
    e[0] = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::min(i + 1, k); j >= 1; --j) e[j] += lambda[i] * e[j - 1];
    return e[k];
}

double cone_margin(const double* lambda, const ConeSpec& cone) {
    return cone_margin(lambda, cone, nullptr);
}

bool in_cone(std::span<const double> lambda, const ConeSpec& cone) {
    check_tuple(lambda, cone.n);
    return cone_margin(lambda.data(), cone, nullptr) > 0.0;
}

bool strictly_inside(std::span<const double> lambda, const ConeSpec& cone) {
    check_tuple(lambda, cone.n);
    return cone_margin(lambda.data(), cone, nullptr) > 1e-10 * (1.0 + norm2(lambda));
}

std::string violated_condition(std::span<const double> lambda, const ConeSpec& cone) {
    check_tuple(lambda, cone.n);
    std::string label;
    return cone_margin(lambda.data(), cone, &label) > 0.0 ? std::string{} : label;
}

double evaluate(const OperatorSpec& op, const double* lambda, double* grad) {
    const int n = op.n;
    switch (op.family) {
        case Family::MongeAmpere: {
            double prod = 1.0;
            for (int i = 0; i < n; ++i) prod *= lambda[i];
            const double f = n == 2 ? std::sqrt(prod) : std::pow(prod, 1.0 / n);
            if (grad)
                for (int i = 0; i < n; ++i) grad[i] = f / (n * lambda[i]);
            return f;
        }
        case Family::Hessian: {
            const int k = op.k;
            std::array<double, kMaxDim + 1> e{};
            esym(lambda, n, k, -1, e.data());
            const double s = e[k];
            const double f = k == 1 ? s : (k == 2 ? std::sqrt(s) : std::pow(s, 1.0 / k));
            if (grad) {
                std::array<double, kMaxDim + 1> ei{};
                for (int i = 0; i < n; ++i) {
                    esym(lambda, n, k - 1, i, ei.data());
                    grad[i] = f / (k * s) * ei[k - 1];
                }
            }
            return f;
        }
        case Family::PMA: {
            const int p = op.k;
            const double count = binomial(n, p);
            double logsum = 0.0;
            for_each_subset(n, p, [&](unsigned mask) {
                logsum += std::log(subset_sum(lambda, n, mask));
            });
            const double f = std::exp(logsum / count);
            if (grad) {
                for (int i = 0; i < n; ++i) grad[i] = 0.0;
                for_each_subset(n, p, [&](unsigned mask) {
                    const double inv = 1.0 / subset_sum(lambda, n, mask);
                    for (int i = 0; i < n; ++i)
                        if (mask & (1u << i)) grad[i] += inv;
                });
                for (int i = 0; i < n; ++i) grad[i] *= f / count;
            }
            return f;
        }
        case Family::PositiveCombination: {
            double f = 0.0;
            std::array<double, kMaxDim> g{};
            if (grad)
                for (int i = 0; i < n; ++i) grad[i] = 0.0;
            for (std::size_t j = 0; j < op.parts.size(); ++j) {
                f += op.weights[j] * evaluate(op.parts[j], lambda, grad ? g.data() : nullptr);
                if (grad)
                    for (int i = 0; i < n; ++i) grad[i] += op.weights[j] * g[i];
            }
            return f;
        }
    }
    return 0.0;
}

double f_value(const OperatorSpec& op, std::span<const double> lambda) {
    check_tuple(lambda, op.n);
    std::string label;
    if (cone_margin(lambda.data(), op.cone, &label) <= 0.0)
        throw DomainError("f_value outside cone " + op.cone.describe() + ": " + label);
    std::array<double, kMaxDim> sorted{};
    std::copy(lambda.begin(), lambda.end(), sorted.begin());
    std::sort(sorted.begin(), sorted.begin() + op.n);
    return evaluate(op, sorted.data(), nullptr);
}

EigenTuple f_gradient(const OperatorSpec& op, std::span<const double> lambda) {
    check_tuple(lambda, op.n);
    std::string label;
    const double margin = cone_margin(lambda.data(), op.cone, &label);
    if (margin <= 0.0)
        throw DomainError("f_gradient outside cone " + op.cone.describe() + ": " + label);
    if (margin <= 1e-10 * (1.0 + norm2(lambda)))
        throw SingularityError("f_gradient on the boundary of " + op.cone.describe() + ": " +
                               label);
    std::array<int, kMaxDim> perm{};
    std::iota(perm.begin(), perm.begin() + op.n, 0);
    std::stable_sort(perm.begin(), perm.begin() + op.n,
                     [&](int a, int b) { return lambda[a] < lambda[b]; });
    std::array<double, kMaxDim> sorted{}, g{};
    for (int i = 0; i < op.n; ++i) sorted[i] = lambda[perm[i]];
    evaluate(op, sorted.data(), g.data());
    EigenTuple out(op.n);
    for (int i = 0; i < op.n; ++i) out[perm[i]] = g[i];
    return out;
}

double structural_product(const OperatorSpec& op, std::span<const double> lambda) {
    auto g = f_gradient(op, lambda);
    double prod = 1.0;
    for (double x : g) prod *= x;
    return prod;
}

EigenTuple sample_cone_point(const ConeSpec& cone, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    EigenTuple v(cone.n);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        double s = 0.0;
        for (auto& x : v) {
            x = normal(rng);
            s += x * x;
        }
        if (s == 0.0) continue;
        s = std::sqrt(s);
        for (auto& x : v) x /= s;
        if (cone_margin(v.data(), cone, nullptr) > 1e-10 * 2.0) return v;
    }
    throw SamplingError("no cone-interior sample found for " + cone.describe());
}

GammaCertificate certify_gamma(const OperatorSpec& op, std::int64_t samples,
                               std::uint64_t seed) {
    if (samples < 1) throw ParameterError("gamma certificate needs at least one sample");
    GammaCertificate cert;
    cert.seed = seed;
    if (op.family == Family::MongeAmpere) {
        cert.gamma = std::pow(static_cast<double>(op.n), -op.n);
        cert.exact = true;
        return cert;
    }
    if (op.family == Family::Hessian && op.k == 1) {
        cert.gamma = 1.0;
        cert.exact = true;
        return cert;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::int64_t max_attempts = 1000 * samples + 100000;
    EigenTuple v(op.n, 1.0);
    double best = structural_product(op, v);
    cert.samples = 1;
    cert.attempts = 1;
    while (cert.samples < samples) {
        if (cert.attempts >= max_attempts)
            throw SamplingError("gamma certificate: rejection budget exhausted for " +
                                op.describe());
        ++cert.attempts;
        double s = 0.0;
        for (auto& x : v) {
            x = normal(rng);
            s += x * x;
        }
        s = std::sqrt(s);
        for (auto& x : v) x /= s;
        if (!(cone_margin(v.data(), op.cone, nullptr) > 1e-10 * 2.0)) continue;
        best = std::min(best, structural_product(op, v));
        ++cert.samples;
    }
    cert.gamma = best;
    return cert;
}

double gamma_certificate(const OperatorSpec& op, std::int64_t samples, std::uint64_t seed) {
    return certify_gamma(op, samples, seed).gamma;
}

}  // namespace linfest::cone
