#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "linfest/error.hpp"
#include "linfest/pipeline.hpp"
#include "linfest/scenario.hpp"

using namespace linfest;
using namespace linfest::exp;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({"name": "n1", "geometry": {"kind": "torus", "n": 1, "m": 16, "r0": 0.125},
 "operator": {"family": "monge_ampere"}, "forcing": {"family": "random-smooth", "amplitude": 1.0, "seed": 7}, "p": 2.5})";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("linfest_unit_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

// Same keys everywhere, same strings and booleans, numbers within a relative tolerance.
void compare_json(const nlohmann::json& a, const nlohmann::json& b, const std::string& path) {
    INFO(path);
    REQUIRE(a.type() == b.type());
    if (a.is_object()) {
        REQUIRE(a.size() == b.size());
        for (auto it = a.begin(); it != a.end(); ++it) {
            REQUIRE(b.contains(it.key()));
            compare_json(*it, b[it.key()], path + "." + it.key());
        }
    } else if (a.is_array()) {
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) compare_json(a[i], b[i], path + "[" + std::to_string(i) + "]");
    } else if (a.is_number_float()) {
        const double x = a.get<double>(), y = b.get<double>();
        CHECK(std::abs(x - y) <= 1e-6 * std::max(1.0, std::max(std::abs(x), std::abs(y))));
    } else {
        CHECK(a == b);
    }
}

}  // namespace

TEST_CASE("scenario defaults and canonical form") {
    auto c = parse_scenario(kSmall);
    CHECK(c.geometry.n == 1);
    CHECK(c.sweep.s_count == 32);
    CHECK(c.sweep.k_factor == 16.0);
    CHECK(c.tol.solve == 1e-8);
    CHECK(c.checks.size() == known_checks().size());
    auto again = parse_scenario(to_json(c));
    CHECK(to_json(again) == to_json(c));
    CHECK(scenario_hash(again) == scenario_hash(c));
    CHECK(scenario_hash(c).size() == 16);
    c.forcing.seed = 8;
    CHECK(scenario_hash(c) != scenario_hash(again));
}

TEST_CASE("scenario validation names the field") {
    auto c = parse_scenario(kSmall);
    auto expect = [](ScenarioConfig bad, const std::string& needle) {
        try {
            validate(bad);
            FAIL("accepted " << needle);
        } catch (const ParameterError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    auto b = c; b.geometry.m = 24; expect(b, "geometry.m");
    b = c; b.p = 1.0; expect(b, "p must exceed n");
    b = c; b.route = "real"; b.p = 2.0; expect(b, "p must exceed 2n");
    b = c; b.geometry.r0 = 0.2; expect(b, "r0");
    b = c; b.geometry.r0 = 0.1; expect(b, "4 r0 / h");
    b = c; b.checks = {"nonsense"}; expect(b, "unknown check");
    b = c; b.forcing.modes = 0; expect(b, "forcing.modes");
    CHECK_THROWS_AS(parse_scenario("{"), ParameterError);
    CHECK_THROWS_AS(parse_scenario(R"({"geometry": {"kind": "sphere"}})"), ParameterError);
    CHECK_NOTHROW(validate(c));
}

TEST_CASE("forcing families") {
    auto mesh = geom::Mesh::torus(2, 16);
    ForcingConfig f;
    f.family = "random-smooth";
    f.amplitude = 0.7;
    f.seed = 3;
    auto a = build_forcing(f, mesh), b = build_forcing(f, mesh);
    CHECK(a.data == b.data);
    double mx = 0.0;
    for (double v : a.data) mx = std::max(mx, std::abs(v));
    CHECK(mx <= 0.7 + 1e-12);
    CHECK(mx > 0.1);
    f.seed = 4;
    CHECK(build_forcing(f, mesh).data != a.data);
    f.family = "bump";
    f.centers = {{0.0, 0.0, 0.0, 0.0}};
    auto bump = build_forcing(f, mesh);
    CHECK(*std::max_element(bump.data.begin(), bump.data.end()) == doctest::Approx(0.7));
    f.family = "constant";
    for (double v : build_forcing(f, mesh).data) CHECK(v == 0.7);
}

TEST_CASE("small run passes and is deterministic") {
    auto c = parse_scenario(kSmall);
    auto r1 = run(c), r2 = run(c);
    CHECK(r1.status == RunStatus::Pass);
    CHECK(r1.sweep.size() == 32);
    CHECK(report_json(r1) == report_json(r2));
    CHECK(checks_csv(r1) == checks_csv(r2));
    CHECK(sweep_csv(r1) == sweep_csv(r2));
    for (const auto& ch : r1.checks) CHECK_MESSAGE(ch.pass, ch.check_id);
    CHECK(std::log(r1.summary.sup_abs_phi) <= r1.summary.certificate_log);
}

TEST_CASE("run directory round trips through verify") {
    auto dir = scratch("verify");
    auto c = parse_scenario(kSmall);
    auto r = run_to_directory(c, dir.string());
    for (const char* f : {"scenario.json", "phi.field", "forcing.field", "omega.field", "solve.json", "report.json",
                          "checks.csv", "sweep.csv", "timing.json"})
        CHECK_MESSAGE(fs::exists(dir / f), f);
    CHECK(slurp(dir / "report.json") == report_json(r));
    auto v = verify(dir.string(), {"comparison", "degiorgi"});
    CHECK(v.hash == r.hash);
    REQUIRE(v.checks.size() == 2);
    for (const auto& ch : v.checks) {
        auto it = std::find_if(r.checks.begin(), r.checks.end(), [&](const auto& x) { return x.check_id == ch.check_id; });
        REQUIRE(it != r.checks.end());
        CHECK(ch.residual == doctest::Approx(it->residual).epsilon(1e-9));
    }
    fs::remove_all(dir);
}

TEST_CASE("output root resolution") {
    ::setenv("LINFEST_OUTPUT_ROOT", "/tmp/root", 1);
    CHECK(resolve_output("a/b") == "/tmp/root/a/b");
    CHECK(resolve_output("/abs") == "/abs");
    ::unsetenv("LINFEST_OUTPUT_ROOT");
    CHECK(resolve_output("a/b") == "a/b");
}

TEST_CASE("entropy table") {
    auto base = parse_scenario(kSmall);
    auto dir = scratch("entropy");
    auto t = sweep_entropy(base, {0.5, 1.0}, 2, dir.string());
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].hash < t.rows[1].hash);
    CHECK(t.dominated);
    CHECK(t.concordance == 1.0);
    auto parsed = parse_entropy_csv(slurp(dir / "entropy.csv"));
    REQUIRE(parsed.rows.size() == 2);
    CHECK(parsed.rows[1].name == t.rows[1].name);
    CHECK(parsed.rows[1].entropy == t.rows[1].entropy);
    CHECK(to_csv(parsed) == to_csv(t));
    fs::remove_all(dir);
}

TEST_CASE("golden sample") {
    const fs::path golden = LINFEST_GOLDEN_DIR;
    auto c = load_scenario((golden / "small_hessian" / "scenario.json").string());
    auto r = run(c);
    CHECK(r.status == RunStatus::Pass);
    auto expected = nlohmann::json::parse(slurp(golden / "small_hessian" / "report.json"));
    compare_json(nlohmann::json::parse(report_json(r)), expected, "report");
}
