#pragma once

#include <string>
#include <vector>

#include "linfest/check_record.hpp"
#include "linfest/field.hpp"
#include "linfest/scenario.hpp"
#include "linfest/solve_report.hpp"

namespace linfest::exp {

enum class RunStatus { Pass = 0, NumericFailure = 2, Violation = 3 };
const char* status_name(RunStatus s);

struct SweepRow {
    double s = 0.0;
    double k = 0.0;
    double A_s = 0.0;
    double phi_of_s = 0.0;
    double A_sk = 0.0;
    double A_s2k = 0.0;
    double eps = 0.0;
    double comparison = 0.0;
    double mask_radius = 0.0;
    std::int64_t mask_nodes = 0;
    int aux_iterations = 0;
};

struct RunSummary {
    double sup_abs_phi = 0.0;
    double min_phi = 0.0;
    double b = 0.0;
    double entropy = 0.0;
    double mass = 0.0;
    double volume = 0.0;
    double l1_phi = 0.0;
    double s0 = 0.0;
    double phi_s0 = 0.0;
    double delta0 = 0.0;
    double C0_functional = 0.0;
    double C0_fit = 0.0;
    double c0 = 0.0;
    bool degiorgi_floored = false;
    double certificate = 0.0;
    double certificate_log = 0.0;
    double certificate_c0_log = 0.0;
    bool certificate_trivial = false;
    double gamma = 0.0;
    double comparison_constant = 0.0;
    int newton_iterations = 0;
    double solve_residual = 0.0;
};

struct ConvergenceRow {
    int m = 0;
    double sup_abs_phi = 0.0;
    double b = 0.0;
    // max difference to the next finer resolution at coincident nodes
    double difference = 0.0;
    double order = 0.0;
};

struct Timing {
    double solve = 0.0;
    double analysis = 0.0;
    double convergence = 0.0;
    double total = 0.0;
};

struct RunReport {
    std::string hash;
    std::string name;
    RunStatus status = RunStatus::Pass;
    std::string error;
    RunSummary summary;
    std::vector<SweepRow> sweep;
    std::vector<lab::CheckRecord> checks;
    std::vector<ConvergenceRow> convergence;
    Timing timing;
};

// Solution fields the analysis stage consumes. F is the effective forcing, e^{nF} omega^n = MA measure.
struct SolvedFields {
    geom::ScalarField phi;
    geom::ScalarField F;
    geom::HermitianField omega;
    double b = 0.0;
    pde::SolveReport solve;
};

SolvedFields solve_stage(const ScenarioConfig& c);
// Sublevel sweep, checks and certificate on given fields.
void analyze(const ScenarioConfig& c, const SolvedFields& fields, RunReport& report);

RunReport run(const ScenarioConfig& c);
// run() plus fields and report files under dir.
RunReport run_to_directory(const ScenarioConfig& c, const std::string& dir);
// Re-runs the analysis on a directory written by run_to_directory.
RunReport verify(const std::string& dir, const std::vector<std::string>& checks);

// Deterministic: no timings.
std::string report_json(const RunReport& r);
std::string checks_csv(const RunReport& r);
std::string sweep_csv(const RunReport& r);
std::string timing_json(const RunReport& r);

// LINFEST_OUTPUT_ROOT joined with a relative output path.
std::string resolve_output(const std::string& output);

struct EntropyRow {
    std::string hash;
    std::string name;
    double amplitude = 0.0;
    double entropy = 0.0;
    double mass = 0.0;
    double sup_abs_phi = 0.0;
    double certificate_log = 0.0;
    double C0_fit = 0.0;
    double c0 = 0.0;
    std::string status;
};

struct EntropyTable {
    std::vector<EntropyRow> rows;
    // fraction of row pairs ordered the same way by entropy and sup|phi|
    double concordance = 0.0;
    // largest sup|phi| ratio within groups of rows whose entropies agree within 2%
    double max_group_spread = 1.0;
    bool dominated = true;
};

std::vector<RunReport> run_members(const std::vector<ScenarioConfig>& members, int workers,
                                   const std::string& dir = "");
EntropyTable tabulate(const std::vector<ScenarioConfig>& members, const std::vector<RunReport>& reports);
EntropyTable sweep_entropy(const ScenarioConfig& base, const std::vector<double>& amplitudes, int workers,
                           const std::string& dir = "");
std::string to_csv(const EntropyTable& t);
EntropyTable parse_entropy_csv(const std::string& text);
std::string to_json(const EntropyTable& t);

}  // namespace linfest::exp
