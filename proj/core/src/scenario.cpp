#include "linfest/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"
#include "linfest/error.hpp"

namespace linfest::exp {

using json = nlohmann::json;

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> ids = {
        "solver", "comparison", "mass_inequality", "phi_monotone", "tau_k",
        "mask",   "degiorgi",   "certificate",     "theta",        "a_s_fit",
        "abp",    "blocki"};
    return ids;
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

OperatorConfig parse_operator(const json& j) {
    OperatorConfig o;
    o.family = get_or<std::string>(j, "family", "monge_ampere");
    o.k = get_or<int>(j, "k", get_or<int>(j, "p", 0));
    o.weights = get_or<std::vector<double>>(j, "weights", {});
    if (j.contains("parts"))
        for (const auto& pj : j.at("parts")) o.parts.push_back(parse_operator(pj));
    return o;
}

json operator_json(const OperatorConfig& o) {
    json j;
    j["family"] = o.family;
    j["k"] = o.k;
    j["weights"] = o.weights;
    j["parts"] = json::array();
    for (const auto& p : o.parts) j["parts"].push_back(operator_json(p));
    return j;
}

bool power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

// Uniform in [-1, 1) from raw generator bits, identical on every standard library.
double unit(std::mt19937_64& rng) { return 2.0 * std::ldexp(double(rng() >> 11), -53) - 1.0; }

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("scenario is not valid JSON: ") + e.what());
    }
    ScenarioConfig c;
    try {
        c.name = get_or<std::string>(j, "name", c.name);
        if (j.contains("geometry")) {
            const json& g = j.at("geometry");
            const std::string kind = get_or<std::string>(g, "kind", "torus");
            if (kind == "torus") c.geometry.kind = geom::Geometry::Torus;
            else if (kind == "ball") c.geometry.kind = geom::Geometry::Ball;
            else throw ParameterError("geometry.kind must be torus or ball");
            c.geometry.n = get_or<int>(g, "n", c.geometry.n);
            c.geometry.m = get_or<int>(g, "m", c.geometry.m);
            c.geometry.period = get_or<double>(g, "period", c.geometry.period);
            c.geometry.radius = get_or<double>(g, "radius", c.geometry.radius);
            const double span = c.geometry.kind == geom::Geometry::Torus ? c.geometry.period : 2.0 * c.geometry.radius;
            c.geometry.r0 = get_or<double>(g, "r0", span / 16.0);
            c.geometry.omega = get_or<std::string>(g, "omega", c.geometry.omega);
            c.geometry.omega_delta = get_or<double>(g, "omega_delta", c.geometry.omega_delta);
            c.geometry.boundary = get_or<double>(g, "boundary", c.geometry.boundary);
        } else {
            c.geometry.r0 = c.geometry.period / 16.0;
        }
        if (j.contains("operator")) c.op = parse_operator(j.at("operator"));
        if (j.contains("forcing")) {
            const json& f = j.at("forcing");
            c.forcing.family = get_or<std::string>(f, "family", c.forcing.family);
            c.forcing.amplitude = get_or<double>(f, "amplitude", c.forcing.amplitude);
            c.forcing.width = get_or<double>(f, "width", c.forcing.width);
            c.forcing.centers = get_or<std::vector<std::vector<double>>>(f, "centers", {});
            c.forcing.modes = get_or<int>(f, "modes", c.forcing.modes);
            c.forcing.seed = get_or<std::uint64_t>(f, "seed", c.forcing.seed);
        }
        c.p = get_or<double>(j, "p", c.p);
        c.route = get_or<std::string>(j, "route", c.route);
        if (j.contains("tolerances")) {
            c.tol.solve = get_or<double>(j.at("tolerances"), "solve", c.tol.solve);
            c.tol.auxiliary = get_or<double>(j.at("tolerances"), "auxiliary", c.tol.auxiliary);
        }
        if (j.contains("sweep")) {
            c.sweep.s_count = get_or<int>(j.at("sweep"), "s_count", c.sweep.s_count);
            c.sweep.k_factor = get_or<double>(j.at("sweep"), "k_factor", c.sweep.k_factor);
            c.sweep.eps_prime = get_or<double>(j.at("sweep"), "eps_prime", c.sweep.eps_prime);
        }
        c.checks = get_or<std::vector<std::string>>(j, "checks", known_checks());
        c.resolutions = get_or<std::vector<int>>(j, "resolutions", {});
        c.output = get_or<std::string>(j, "output", c.name);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("scenario field has the wrong type: ") + e.what());
    }
    return c;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open scenario " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string to_json(const ScenarioConfig& c) {
    json j;
    j["name"] = c.name;
    json g;
    g["kind"] = c.geometry.kind == geom::Geometry::Torus ? "torus" : "ball";
    g["n"] = c.geometry.n;
    g["m"] = c.geometry.m;
    g["period"] = c.geometry.period;
    g["radius"] = c.geometry.radius;
    g["r0"] = c.geometry.r0;
    g["omega"] = c.geometry.omega;
    g["omega_delta"] = c.geometry.omega_delta;
    g["boundary"] = c.geometry.boundary;
    j["geometry"] = g;
    j["operator"] = operator_json(c.op);
    json f;
    f["family"] = c.forcing.family;
    f["amplitude"] = c.forcing.amplitude;
    f["width"] = c.forcing.width;
    f["centers"] = c.forcing.centers;
    f["modes"] = c.forcing.modes;
    f["seed"] = c.forcing.seed;
    j["forcing"] = f;
    j["p"] = c.p;
    j["route"] = c.route;
    j["tolerances"] = {{"solve", c.tol.solve}, {"auxiliary", c.tol.auxiliary}};
    j["sweep"] = {{"s_count", c.sweep.s_count}, {"k_factor", c.sweep.k_factor}, {"eps_prime", c.sweep.eps_prime}};
    j["checks"] = c.checks;
    j["resolutions"] = c.resolutions;
    j["output"] = c.output;
    return j.dump(2);
}

std::string scenario_hash(const ScenarioConfig& c) {
    const std::string s = to_json(c);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void validate(const ScenarioConfig& c) {
    const GeometryConfig& g = c.geometry;
    if (g.n < 1 || g.n > geom::kMaxComplexDim) throw ParameterError("geometry.n must be in [1, 4]");
    if (!power_of_two(g.m) || g.m < 8 || g.m > 256) throw ParameterError("geometry.m must be a power of two in [8, 256]");
    if (c.route != "complex" && c.route != "real") throw ParameterError("route must be complex or real");
    const double pmin = c.route == "complex" ? g.n : 2.0 * g.n;
    if (!(c.p > pmin)) throw ParameterError(c.route == "complex" ? "p must exceed n" : "p must exceed 2n");
    if (!(g.r0 > 0.0)) throw ParameterError("geometry.r0 must be positive");
    double h = 0.0;
    if (g.kind == geom::Geometry::Torus) {
        if (!(g.period > 0.0)) throw ParameterError("geometry.period must be positive");
        if (g.r0 > g.period / 8.0 + 1e-15) throw ParameterError("geometry.r0 must not exceed period / 8");
        h = g.period / g.m;
    } else {
        if (!(g.radius > 0.0)) throw ParameterError("geometry.radius must be positive");
        if (c.op.family != "monge_ampere") throw ParameterError("ball scenarios support the monge_ampere operator only");
        if (g.omega != "identity") throw ParameterError("ball scenarios use omega = identity");
        h = 2.0 * g.radius / g.m;
    }
    const double cells = 4.0 * g.r0 / h;
    if (std::abs(cells - std::round(cells)) > 1e-9 * cells || std::lround(cells) % 2 != 0 || cells < 8.0)
        throw ParameterError("geometry.r0 must make 4 r0 / h an even integer >= 8");
    if (g.omega != "identity" && g.omega != "perturbed") throw ParameterError("geometry.omega must be identity or perturbed");
    if (std::abs(g.omega_delta) > 0.5) throw ParameterError("geometry.omega_delta must be at most 1/2");
    const auto& fam = c.forcing.family;
    if (fam != "constant" && fam != "bump" && fam != "multi-bump" && fam != "random-smooth")
        throw ParameterError("forcing.family must be constant, bump, multi-bump or random-smooth");
    if (!std::isfinite(c.forcing.amplitude)) throw ParameterError("forcing.amplitude must be finite");
    if (!(c.forcing.width > 0.0)) throw ParameterError("forcing.width must be positive");
    for (const auto& ctr : c.forcing.centers)
        if (static_cast<int>(ctr.size()) != 2 * g.n) throw ParameterError("forcing.centers entries need 2n coordinates");
    if (c.forcing.modes < 1 || c.forcing.modes > 64) throw ParameterError("forcing.modes must be in [1, 64]");
    if (!(c.tol.solve > 0.0) || !(c.tol.auxiliary > 0.0)) throw ParameterError("tolerances must be positive");
    if (c.sweep.s_count < 2) throw ParameterError("sweep.s_count must be at least 2");
    if (!(c.sweep.k_factor > 0.0)) throw ParameterError("sweep.k_factor must be positive");
    if (!(c.sweep.eps_prime > 0.0)) throw ParameterError("sweep.eps_prime must be positive");
    for (const auto& id : c.checks)
        if (std::find(known_checks().begin(), known_checks().end(), id) == known_checks().end())
            throw ParameterError("unknown check " + id);
    for (int m : c.resolutions)
        if (!power_of_two(m) || m < 8 || m > 256) throw ParameterError("resolutions must be powers of two in [8, 256]");
    if (!c.resolutions.empty() && g.kind != geom::Geometry::Torus)
        throw ParameterError("convergence blocks are available on tori only");
    build_operator(c.op, g.n);
}

cone::OperatorSpec build_operator(const OperatorConfig& c, int n) {
    if (c.family == "monge_ampere") return cone::OperatorSpec::monge_ampere(n);
    if (c.family == "hessian") {
        if (c.k < 1 || c.k > n) throw ParameterError("operator.k must be in [1, n]");
        return cone::OperatorSpec::hessian(n, c.k);
    }
    if (c.family == "pma") {
        if (c.k < 1 || c.k > n) throw ParameterError("operator.p must be in [1, n]");
        return cone::OperatorSpec::pma(n, c.k);
    }
    if (c.family == "combination") {
        std::vector<cone::OperatorSpec> parts;
        for (const auto& p : c.parts) parts.push_back(build_operator(p, n));
        return cone::OperatorSpec::positive_combination(c.weights, std::move(parts));
    }
    throw ParameterError("unknown operator family " + c.family);
}

geom::MeshPtr build_mesh(const GeometryConfig& g) { return build_mesh(g, g.m); }

geom::MeshPtr build_mesh(const GeometryConfig& g, int m) {
    if (g.kind == geom::Geometry::Torus) return geom::Mesh::torus(g.n, m, g.period);
    return geom::Mesh::ball(g.n, m, g.radius);
}

geom::HermitianField build_omega(const GeometryConfig& g, const geom::MeshPtr& mesh) {
    if (g.omega == "perturbed") return geom::HermitianField::perturbed(mesh, g.omega_delta);
    return geom::HermitianField::identity(mesh);
}

geom::ScalarField build_forcing(const ForcingConfig& f, const geom::MeshPtr& mesh) {
    const geom::Mesh& M = *mesh;
    const int d = M.dim();
    const double L = M.is_torus() ? M.period() : 2.0 * M.radius();
    auto sq_dist = [&](const double* x, const std::vector<double>& c) {
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) {
            double t = x[a] - c[a];
            if (M.is_torus()) t -= L * std::round(t / L);
            r2 += t * t;
        }
        return r2;
    };
    std::vector<std::vector<double>> centers = f.centers;
    if (centers.empty()) centers.push_back(M.is_torus() ? std::vector<double>(d, 0.0) : M.center());
    const double iw = 1.0 / (2.0 * f.width * f.width);
    if (f.family == "constant") return geom::ScalarField(mesh, f.amplitude);
    if (f.family == "bump")
        return geom::ScalarField::from_function(mesh, [&](const double* x) {
            return f.amplitude * std::exp(-sq_dist(x, centers.front()) * iw);
        });
    if (f.family == "multi-bump") {
        if (f.centers.empty()) {
            std::mt19937_64 rng(f.seed);
            centers.clear();
            for (int b = 0; b < 3; ++b) {
                std::vector<double> c(d);
                for (int a = 0; a < d; ++a) c[a] = (M.is_torus() ? 0.0 : M.center()[a]) + 0.25 * L * unit(rng);
                centers.push_back(c);
            }
        }
        return geom::ScalarField::from_function(mesh, [&](const double* x) {
            double v = 0.0;
            for (const auto& c : centers) v += std::exp(-sq_dist(x, c) * iw);
            return f.amplitude * v;
        });
    }
    // random-smooth: `modes` seeded wave vectors with entries in [-2, 2]
    std::mt19937_64 rng(f.seed);
    struct Mode {
        std::vector<int> k;
        double a, b;
    };
    std::vector<Mode> modes;
    double norm = 0.0;
    while (static_cast<int>(modes.size()) < f.modes) {
        Mode md{std::vector<int>(d), 0.0, 0.0};
        int k2 = 0;
        for (int a = 0; a < d; ++a) {
            md.k[a] = static_cast<int>(rng() % 5) - 2;
            k2 += md.k[a] * md.k[a];
        }
        if (k2 == 0) continue;
        md.a = unit(rng) / (1.0 + k2);
        md.b = unit(rng) / (1.0 + k2);
        norm += std::abs(md.a) + std::abs(md.b);
        modes.push_back(std::move(md));
    }
    const double w = 2.0 * std::numbers::pi / L;
    return geom::ScalarField::from_function(mesh, [&](const double* x) {
        double v = 0.0;
        for (const auto& md : modes) {
            double ph = 0.0;
            for (int a = 0; a < d; ++a) ph += md.k[a] * x[a];
            v += md.a * std::cos(w * ph) + md.b * std::sin(w * ph);
        }
        return norm > 0.0 ? f.amplitude * v / norm : 0.0;
    });
}

}  // namespace linfest::exp
