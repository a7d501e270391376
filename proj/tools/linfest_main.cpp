#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "linfest/error.hpp"
#include "linfest/pipeline.hpp"
#include "linfest/scenario.hpp"

namespace fs = std::filesystem;
using namespace linfest;

namespace {

struct Overrides {
    double tol = 0.0;
    int resolution = 0;
    long long seed = -1;
};

exp::ScenarioConfig load(const std::string& path, const Overrides& o) {
    exp::ScenarioConfig c = exp::load_scenario(path);
    if (o.tol > 0.0) c.tol.solve = c.tol.auxiliary = o.tol;
    if (o.resolution > 0) c.geometry.m = o.resolution;
    if (o.seed >= 0) c.forcing.seed = static_cast<std::uint64_t>(o.seed);
    exp::validate(c);
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ParameterError("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_checks(const exp::RunReport& r) {
    for (const auto& c : r.checks)
        std::printf("%-16s %-5s residual %.6e slack %.3e\n", c.check_id.c_str(), c.pass ? "pass" : "FAIL", c.residual,
                    c.slack);
    std::printf("status %s", exp::status_name(r.status));
    if (!r.error.empty()) std::printf(" (%s)", r.error.c_str());
    std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sublevel-set L-infinity estimate laboratory"};
    app.require_subcommand(1);
    Overrides o;
    int workers = 1;
    app.add_option("--workers", workers, "concurrent sweep members")->check(CLI::PositiveNumber);
    app.add_option("--tol", o.tol, "solver tolerance override")->check(CLI::PositiveNumber);
    app.add_option("--resolution", o.resolution, "grid resolution override");
    app.add_option("--seed", o.seed, "forcing seed override");

    auto* run = app.add_subcommand("run", "solve one scenario and run its checks");
    std::string run_config, run_out;
    run->add_option("config", run_config)->required()->check(CLI::ExistingFile);
    run->add_option("--out", run_out, "output directory (default: scenario output)");

    auto* sweep = app.add_subcommand("sweep", "entropy sweep over forcing amplitudes");
    std::string sweep_config, sweep_out;
    std::vector<double> amplitudes;
    sweep->add_option("config", sweep_config)->required()->check(CLI::ExistingFile);
    sweep->add_option("--amplitudes", amplitudes)->required()->delimiter(',');
    sweep->add_option("--out", sweep_out);

    auto* verify = app.add_subcommand("verify", "re-run checks on a stored run directory");
    std::string verify_dir;
    std::vector<std::string> verify_checks;
    verify->add_option("fields-dir", verify_dir)->required()->check(CLI::ExistingDirectory);
    verify->add_option("--checks", verify_checks)->delimiter(',');

    auto* report = app.add_subcommand("report", "print a stored report");
    std::string report_dir, format = "json";
    report->add_option("dir", report_dir)->required()->check(CLI::ExistingDirectory);
    report->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto c = load(run_config, o);
            const std::string dir = exp::resolve_output(run_out.empty() ? c.output : run_out);
            const auto r = exp::run_to_directory(c, dir);
            print_checks(r);
            std::printf("certificate log %.6g  sup|phi| %.6g  report %s\n", r.summary.certificate_log,
                        r.summary.sup_abs_phi, (fs::path(dir) / "report.json").c_str());
            return static_cast<int>(r.status);
        }
        if (*sweep) {
            const auto c = load(sweep_config, o);
            const std::string dir = exp::resolve_output(sweep_out.empty() ? c.output : sweep_out);
            fs::create_directories(dir);
            const auto t = exp::sweep_entropy(c, amplitudes, workers, dir);
            std::cout << exp::to_csv(t);
            std::printf("concordance %.3f  group spread %.4f  certificate dominates %s\n", t.concordance,
                        t.max_group_spread, t.dominated ? "yes" : "no");
            bool failed = false;
            for (const auto& r : t.rows) failed |= r.status == "numeric_failure";
            if (failed) return 2;
            for (const auto& r : t.rows)
                if (r.status != "pass") return 3;
            return t.dominated ? 0 : 3;
        }
        if (*verify) {
            const auto r = exp::verify(verify_dir, verify_checks);
            print_checks(r);
            return static_cast<int>(r.status);
        }
        if (*report) {
            const fs::path dir(report_dir);
            if (format == "json") {
                std::cout << slurp(dir / "report.json");
            } else {
                std::cout << slurp(dir / "checks.csv");
            }
            return 0;
        }
    } catch (const ParameterError& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 2;
    }
    return 0;
}
