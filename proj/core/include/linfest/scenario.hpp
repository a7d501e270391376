#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linfest/cone.hpp"
#include "linfest/field.hpp"

namespace linfest::exp {

struct GeometryConfig {
    geom::Geometry kind = geom::Geometry::Torus;
    int n = 2;
    int m = 32;
    double period = 1.0;  // torus
    double radius = 0.5;  // ball
    double r0 = 0.0625;
    // identity | perturbed
    std::string omega = "identity";
    double omega_delta = 0.0;
    // ball: constant Dirichlet value of phi
    double boundary = 0.0;
};

struct OperatorConfig {
    // monge_ampere | hessian | pma | combination
    std::string family = "monge_ampere";
    int k = 0;
    std::vector<double> weights;
    std::vector<OperatorConfig> parts;
};

struct ForcingConfig {
    // constant | bump | multi-bump | random-smooth
    std::string family = "constant";
    double amplitude = 0.0;
    double width = 0.15;
    std::vector<std::vector<double>> centers;
    int modes = 8;
    std::uint64_t seed = 1;
};

struct Tolerances {
    double solve = 1e-8;
    double auxiliary = 1e-8;
};

struct SweepConfig {
    int s_count = 32;
    // smoothing index k = k_factor / s
    double k_factor = 16.0;
    double eps_prime = 0.5;
};

struct ScenarioConfig {
    std::string name = "scenario";
    GeometryConfig geometry;
    OperatorConfig op;
    ForcingConfig forcing;
    double p = 4.0;
    // complex | real
    std::string route = "complex";
    Tolerances tol;
    SweepConfig sweep;
    std::vector<std::string> checks;
    // extra torus resolutions for the convergence block
    std::vector<int> resolutions;
    std::string output = "out";
};

const std::vector<std::string>& known_checks();

ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);
// Canonical JSON, sorted keys, doubles at full precision.
std::string to_json(const ScenarioConfig& c);
// FNV-1a 64 of the canonical JSON, 16 hex digits.
std::string scenario_hash(const ScenarioConfig& c);

// Throws ParameterError naming the offending field.
void validate(const ScenarioConfig& c);

cone::OperatorSpec build_operator(const OperatorConfig& c, int n);
geom::MeshPtr build_mesh(const GeometryConfig& g);
geom::MeshPtr build_mesh(const GeometryConfig& g, int m);
geom::HermitianField build_omega(const GeometryConfig& g, const geom::MeshPtr& mesh);
geom::ScalarField build_forcing(const ForcingConfig& f, const geom::MeshPtr& mesh);

}  // namespace linfest::exp
