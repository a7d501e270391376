#include "linfest/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "linfest/certificate.hpp"
#include "linfest/degiorgi.hpp"
#include "linfest/dirichlet_solver.hpp"
#include "linfest/error.hpp"
#include "linfest/field_io.hpp"
#include "linfest/hermitian_ops.hpp"
#include "linfest/inequalities.hpp"
#include "linfest/periodic_solver.hpp"
#include "linfest/real_route.hpp"
#include "linfest/sublevel.hpp"
#include "linfest/theta.hpp"

namespace linfest::exp {

namespace fs = std::filesystem;
using geom::HermitianField;
using geom::ScalarField;
using ojson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

const char* status_name(RunStatus s) {
    switch (s) {
        case RunStatus::Pass: return "pass";
        case RunStatus::NumericFailure: return "numeric_failure";
        case RunStatus::Violation: return "violation";
    }
    return "unknown";
}

namespace {

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool wants(const ScenarioConfig& c, const std::string& id) {
    return std::find(c.checks.begin(), c.checks.end(), id) != c.checks.end();
}

double squared_radius(const geom::Mesh& m, std::int64_t i) {
    double x[geom::kMaxRealDim];
    m.coordinates(i, x);
    double r2 = 0.0;
    for (int a = 0; a < m.dim(); ++a) {
        const double t = x[a] - (m.is_torus() ? 0.0 : m.center()[a]);
        r2 += t * t;
    }
    return r2;
}

// phi(s) = measure of {v < s} with v = phi - phi(x0) + eps' |z|^2 on the chart.
class PhiCurve {
public:
    PhiCurve(const ScalarField& phic, std::int64_t x0, const ScalarField& Fc, const HermitianField& omc,
             double eps_prime) {
        const geom::Mesh& m = *phic.mesh;
        const int n = m.n();
        std::vector<std::pair<double, double>> vw;
        for (std::int64_t i : m.interior())
            vw.emplace_back(phic[i] - phic[x0] + eps_prime * squared_radius(m, i),
                            std::exp(n * Fc[i]) * geom::det_metric(omc, i) * m.cell_volume());
        std::sort(vw.begin(), vw.end());
        long double acc = 0.0L;
        for (const auto& [v, w] : vw) {
            acc += w;
            v_.push_back(v);
            cum_.push_back(static_cast<double>(acc));
        }
    }
    double operator()(double s) const {
        const auto k = std::lower_bound(v_.begin(), v_.end(), s) - v_.begin();
        return k ? cum_[k - 1] : 0.0;
    }

private:
    std::vector<double> v_, cum_;
};

ScalarField ball_bowl(const geom::MeshPtr& mesh) {
    ScalarField q(mesh, 0.0);
    for (std::int64_t i = 0; i < mesh->size(); ++i) q[i] = squared_radius(*mesh, i);
    return q;
}

pde::DirichletProblem ball_problem(const ScenarioConfig& c, const ScalarField& F) {
    const geom::MeshPtr& mesh = F.mesh;
    const int n = mesh->n();
    ScalarField rho(mesh, 0.0), g = ball_bowl(mesh);
    for (std::int64_t i = 0; i < mesh->size(); ++i) {
        if (mesh->kind(i) != geom::NodeKind::Exterior) rho[i] = std::exp(n * F[i]);
        g[i] += c.geometry.boundary;
    }
    return pde::DirichletProblem(std::move(rho), std::move(g));
}

double sup_abs(const ScalarField& phi) {
    double s = 0.0;
    geom::for_each_active(*phi.mesh, [&](std::int64_t i) { s = std::max(s, std::abs(phi[i])); });
    return s;
}

double l1_norm(const ScalarField& phi, const HermitianField& omega) {
    ScalarField a(phi.mesh, 0.0);
    for (std::int64_t i = 0; i < a.size(); ++i) a[i] = std::abs(phi[i]);
    return geom::integrate(a, omega);
}

void add(RunReport& r, const std::string& id, double residual, double slack) {
    r.checks.push_back(lab::make_record(id, r.hash, residual, slack));
}

void finalize_status(RunReport& r) {
    if (r.status == RunStatus::NumericFailure) return;
    for (const auto& c : r.checks)
        if (!c.pass) r.status = RunStatus::Violation;
}

}  // namespace

SolvedFields solve_stage(const ScenarioConfig& c) {
    const auto mesh = build_mesh(c.geometry);
    SolvedFields out;
    out.omega = build_omega(c.geometry, mesh);
    const ScalarField F = build_forcing(c.forcing, mesh);
    if (mesh->is_torus()) {
        const auto op = build_operator(c.op, c.geometry.n);
        out.solve = pde::solve_periodic_fnl(op, out.omega, F, c.tol.solve);
        out.b = out.solve.b_constant;
        out.phi = out.solve.solution;
        out.F = F;
        for (auto& v : out.F.data) v += out.b;
    } else {
        out.solve = pde::solve_dirichlet_cma(ball_problem(c, F), c.tol.solve);
        out.phi = out.solve.solution;
        const ScalarField q = ball_bowl(mesh);
        for (std::int64_t i = 0; i < mesh->size(); ++i) out.phi[i] -= q[i];
        out.F = F;
    }
    return out;
}

void analyze(const ScenarioConfig& c, const SolvedFields& fields, RunReport& report) {
    const ScalarField& phi = fields.phi;
    const ScalarField& F = fields.F;
    const HermitianField& omega = fields.omega;
    const geom::MeshPtr& mesh = phi.mesh;
    const int n = mesh->n();
    const double h = mesh->spacing();
    const auto op = build_operator(c.op, n);
    RunSummary& S = report.summary;
    S.gamma = op.gamma;
    S.comparison_constant = lab::comparison_constant(op.gamma, n);

    if (wants(c, "solver")) {
        double res;
        if (mesh->is_torus()) {
            int viol = 0;
            res = pde::periodic_residual(op, omega, F, phi, 0.0, &viol);
            if (viol) res = std::numeric_limits<double>::infinity();
        } else {
            ScalarField psi = phi;
            const ScalarField q = ball_bowl(mesh);
            for (std::int64_t i = 0; i < mesh->size(); ++i) psi[i] += q[i];
            res = pde::dirichlet_residual(ball_problem(c, F), psi, false);
        }
        S.solve_residual = res;
        add(report, "solver", res, 10.0 * c.tol.solve);
    }

    const std::int64_t x0 = lab::argmin_node(phi);
    S.min_phi = phi[x0];
    S.sup_abs_phi = sup_abs(phi);
    const geom::EntropyReport E = geom::entropy(F, omega, c.p);
    S.entropy = E.value;
    S.mass = E.mass;
    S.volume = geom::integrate(ScalarField(mesh, 1.0), omega);
    S.l1_phi = l1_norm(phi, omega);
    S.delta0 = lab::delta0(c.p, n);

    const double r0 = c.geometry.r0;
    const double ep = c.sweep.eps_prime;
    const lab::Chart chart = lab::make_chart(mesh, x0, r0);
    const ScalarField phic = lab::pull_back(chart, phi);
    const ScalarField Fc = lab::pull_back(chart, F);
    const HermitianField omc = lab::pull_back(chart, omega);
    const double s0 = 4.0 * ep * r0 * r0;
    S.s0 = s0;

    std::vector<double> grid = lab::s_grid(s0, c.sweep.s_count);
    std::reverse(grid.begin(), grid.end());
    const bool need_sweep = wants(c, "comparison") || wants(c, "mass_inequality") || wants(c, "phi_monotone") ||
                            wants(c, "tau_k") || wants(c, "mask") || wants(c, "a_s_fit");
    std::optional<ScalarField> warm;
    double chart_volume = 0.0, wmax = 0.0;
    for (std::int64_t i : chart.mesh->interior()) {
        const double w = std::exp(n * Fc[i]) * geom::det_metric(omc, i);
        chart_volume += geom::det_metric(omc, i);
        wmax = std::max(wmax, w);
    }
    chart_volume *= chart.mesh->cell_volume();
    std::optional<lab::SublevelReport> at_s0;
    if (need_sweep) {
        for (double s : grid) {
            const ScalarField u = lab::build_u_s(phic, chart.x0, s, ep);
            SweepRow row;
            row.s = s;
            row.k = c.sweep.k_factor / s;
            lab::SublevelReport rep = lab::sublevel_masses(u, Fc, omc, row.k);
            row.A_s = rep.A_s;
            row.phi_of_s = rep.phi_of_s;
            row.A_sk = rep.A_sk;
            row.A_s2k = lab::sublevel_masses(u, Fc, omc, 2.0 * row.k).A_sk;
            row.mask_nodes = rep.mask_nodes;
            double r2 = 0.0;
            for (std::int64_t i = 0; i < chart.mesh->size(); ++i)
                if (rep.mask[i]) r2 = std::max(r2, squared_radius(*chart.mesh, i));
            row.mask_radius = std::sqrt(r2);
            if (wants(c, "comparison")) {
                pde::DirichletOptions dop;
                dop.psi0 = warm;
                const pde::SolveReport aux =
                    pde::solve_dirichlet_cma(lab::auxiliary_problem(rep, Fc, omc), c.tol.auxiliary, dop);
                warm = aux.solution;
                row.aux_iterations = aux.iterations;
                row.eps = lab::epsilon_lemma2(rep.A_sk, op.gamma, n);
                row.comparison = lab::comparison_residual(u, aux.solution, row.eps);
            }
            report.sweep.push_back(row);
            if (s == grid.front()) at_s0 = std::move(rep);
        }
        std::reverse(report.sweep.begin(), report.sweep.end());
    }
    const auto& rows = report.sweep;

    if (wants(c, "comparison") && !rows.empty()) {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& r : rows) worst = std::max(worst, r.comparison);
        add(report, "comparison", worst, 10.0 * h * h);
    }
    if (wants(c, "mass_inequality") && rows.size() > 1) {
        // t phi(s - t) <= A_s on ten (s, t) pairs
        double worst = -std::numeric_limits<double>::infinity(), scale = 0.0;
        const int cnt = static_cast<int>(rows.size());
        for (int q = 0; q < 10; ++q) {
            const int i = std::max(1, cnt - 1 - q);
            const int j = std::max(0, i - 1 - q);
            const double t = rows[i].s - rows[j].s;
            worst = std::max(worst, t * rows[j].phi_of_s - rows[i].A_s);
            scale = std::max(scale, rows[i].A_s);
        }
        add(report, "mass_inequality", worst, 1e-12 * scale);
    }
    if (wants(c, "phi_monotone") && rows.size() > 1) {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < rows.size(); ++i)
            worst = std::max(worst, rows[i].phi_of_s - rows[i + 1].phi_of_s);
        worst = std::max(worst, -rows.front().phi_of_s);
        add(report, "phi_monotone", worst, 0.0);
    }
    if (wants(c, "tau_k") && !rows.empty()) {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& r : rows) {
            worst = std::max(worst, r.A_s - r.A_sk);
            worst = std::max(worst, (r.A_sk - r.A_s) - chart_volume * wmax / r.k);
            worst = std::max(worst, r.A_s2k - r.A_sk);
        }
        add(report, "tau_k", worst, 1e-12 * std::max(1e-300, rows.back().A_sk));
    }
    if (wants(c, "mask") && !rows.empty()) {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& r : rows) worst = std::max(worst, r.mask_radius - std::min(std::sqrt(r.s / ep), 2.0 * r0));
        add(report, "mask", worst, 1e-12);
    }
    if (!rows.empty()) {
        for (const auto& r : rows)
            if (r.phi_of_s > 0.0) S.C0_fit = std::max(S.C0_fit, r.A_s / std::pow(r.phi_of_s, 1.0 + S.delta0));
        if (wants(c, "a_s_fit")) {
            double worst = -std::numeric_limits<double>::infinity();
            for (const auto& r : rows)
                worst = std::max(worst, r.phi_of_s > 0.0 ? r.A_s - S.C0_fit * std::pow(r.phi_of_s, 1.0 + S.delta0) : 0.0);
            add(report, "a_s_fit", worst, 1e-12 * std::max(1e-300, rows.back().A_s));
        }
    }

    const PhiCurve curve(phic, chart.x0, Fc, omc, ep);
    const lab::PhiFunction phi_fn = [&curve](double s) { return curve(s); };
    S.phi_s0 = curve(s0);
    std::optional<lab::IterationTrace> trace;
    if (wants(c, "degiorgi") || wants(c, "certificate")) {
        S.C0_functional = lab::functional_constant(phi_fn, s0, S.delta0, 200);
        trace = lab::degiorgi_iterate(phi_fn, s0, S.C0_functional, S.delta0);
        S.c0 = trace->c0;
        S.degiorgi_floored = trace->floored;
        if (wants(c, "degiorgi")) add(report, "degiorgi", trace->c0 - trace->phi_values.front(), 0.0);
    }
    if (wants(c, "certificate")) {
        const lab::Certificate cert = lab::certify_min(phi, F, omega, c.p, E, *trace);
        S.certificate = cert.value;
        S.certificate_log = cert.log_value;
        S.certificate_trivial = cert.trivial;
        S.certificate_c0_log = std::log(lab::min_bound_certificate_c0(phi, F, omega, c.p, E, *trace));
        const double lhs = S.sup_abs_phi > 0.0 ? std::log(S.sup_abs_phi) : -std::numeric_limits<double>::max();
        add(report, "certificate", std::max(lhs - cert.log_value, -1e300), 0.0);
    }
    if (wants(c, "theta") && n >= 2) {
        const geom::EigenField lam = geom::endo_eigenvalues(omega, geom::omega_phi(omega, phi));
        const lab::ThetaResult th = lab::theta_tensor(op, lam, omega, F);
        add(report, "theta", -th.scaled_residual, 1e-10);
    }
    if (c.route == "real" && (wants(c, "abp") || wants(c, "blocki"))) {
        if (!at_s0) {
            const ScalarField u = lab::build_u_s(phic, chart.x0, s0, ep);
            at_s0 = lab::sublevel_masses(u, Fc, omc, c.sweep.k_factor / s0);
        }
        const pde::SolveReport real_aux =
            pde::solve_dirichlet_rma(lab::auxiliary_problem(*at_s0, Fc, omc), c.tol.auxiliary);
        if (wants(c, "abp")) {
            const lab::AbpResult abp = lab::abp_check(real_aux.solution, r0);
            add(report, "abp", std::max(abp.depth_residual, abp.gradient_residual), 5.0 * h);
        }
        if (wants(c, "blocki")) add(report, "blocki", -lab::hessian_det_comparison(real_aux.solution), 1e-10);
    }
}

RunReport run(const ScenarioConfig& c) {
    const auto t0 = Clock::now();
    validate(c);
    RunReport report;
    report.hash = scenario_hash(c);
    report.name = c.name;
    try {
        auto t = Clock::now();
        const SolvedFields fields = solve_stage(c);
        report.timing.solve = since(t);
        report.summary.b = fields.b;
        report.summary.newton_iterations = fields.solve.iterations;
        t = Clock::now();
        analyze(c, fields, report);
        report.timing.analysis = since(t);
        if (!c.resolutions.empty()) {
            t = Clock::now();
            std::vector<int> ms = c.resolutions;
            ms.push_back(c.geometry.m);
            std::sort(ms.begin(), ms.end());
            ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
            if (ms.size() == 2 && ms.front() >= 16) ms.insert(ms.begin(), ms.front() / 2);
            std::vector<ScalarField> sols;
            for (int m : ms) {
                ScenarioConfig cm = c;
                cm.geometry.m = m;
                const SolvedFields f = m == c.geometry.m ? fields : solve_stage(cm);
                report.convergence.push_back({m, sup_abs(f.phi), f.b, 0.0, 0.0});
                sols.push_back(f.phi);
            }
            for (std::size_t k = 0; k + 1 < sols.size(); ++k) {
                const ScalarField fine = pde::restrict_torus(sols[k + 1], sols[k].mesh);
                double d = 0.0;
                for (std::int64_t i = 0; i < fine.size(); ++i) d = std::max(d, std::abs(fine[i] - sols[k][i]));
                report.convergence[k].difference = d;
            }
            for (std::size_t k = 0; k + 2 < sols.size(); ++k)
                report.convergence[k].order =
                    std::log2(report.convergence[k].difference / report.convergence[k + 1].difference);
            report.timing.convergence = since(t);
        }
    } catch (const Error& e) {
        report.status = RunStatus::NumericFailure;
        report.error = e.what();
    }
    finalize_status(report);
    report.timing.total = since(t0);
    return report;
}

std::string report_json(const RunReport& r) {
    ojson j;
    j["hash"] = r.hash;
    j["name"] = r.name;
    j["status"] = status_name(r.status);
    j["error"] = r.error;
    const RunSummary& S = r.summary;
    ojson s;
    s["sup_abs_phi"] = num(S.sup_abs_phi);
    s["min_phi"] = num(S.min_phi);
    s["b"] = num(S.b);
    s["entropy"] = num(S.entropy);
    s["mass"] = num(S.mass);
    s["volume"] = num(S.volume);
    s["l1_phi"] = num(S.l1_phi);
    s["s0"] = num(S.s0);
    s["phi_s0"] = num(S.phi_s0);
    s["delta0"] = num(S.delta0);
    s["C0_functional"] = num(S.C0_functional);
    s["C0_fit"] = num(S.C0_fit);
    s["c0"] = num(S.c0);
    s["degiorgi_floored"] = S.degiorgi_floored;
    s["certificate"] = num(S.certificate);
    s["certificate_log"] = num(S.certificate_log);
    s["certificate_c0_log"] = num(S.certificate_c0_log);
    s["certificate_trivial"] = S.certificate_trivial;
    s["gamma"] = num(S.gamma);
    s["comparison_constant"] = num(S.comparison_constant);
    s["newton_iterations"] = S.newton_iterations;
    s["solve_residual"] = num(S.solve_residual);
    j["summary"] = s;
    j["checks"] = ojson::array();
    for (const auto& c : r.checks)
        j["checks"].push_back({{"check_id", c.check_id},
                               {"instance_id", c.instance_id},
                               {"residual", num(c.residual)},
                               {"slack", num(c.slack)},
                               {"pass", c.pass}});
    j["convergence"] = ojson::array();
    for (const auto& c : r.convergence)
        j["convergence"].push_back({{"m", c.m},
                                    {"sup_abs_phi", num(c.sup_abs_phi)},
                                    {"b", num(c.b)},
                                    {"difference", num(c.difference)},
                                    {"order", num(c.order)}});
    return j.dump(2) + "\n";
}

std::string checks_csv(const RunReport& r) {
    std::string out = "check_id,instance_id,residual,slack,pass\n";
    for (const auto& c : r.checks)
        out += c.check_id + "," + c.instance_id + "," + fmt(c.residual) + "," + fmt(c.slack) + "," +
               (c.pass ? "true" : "false") + "\n";
    return out;
}

std::string sweep_csv(const RunReport& r) {
    std::string out = "s,k,A_s,phi_of_s,A_sk,A_s2k,eps,comparison,mask_radius,mask_nodes,aux_iterations\n";
    for (const auto& w : r.sweep)
        out += fmt(w.s) + "," + fmt(w.k) + "," + fmt(w.A_s) + "," + fmt(w.phi_of_s) + "," + fmt(w.A_sk) + "," +
               fmt(w.A_s2k) + "," + fmt(w.eps) + "," + fmt(w.comparison) + "," + fmt(w.mask_radius) + "," +
               std::to_string(w.mask_nodes) + "," + std::to_string(w.aux_iterations) + "\n";
    return out;
}

std::string timing_json(const RunReport& r) {
    ojson j;
    j["hash"] = r.hash;
    j["solve_seconds"] = r.timing.solve;
    j["analysis_seconds"] = r.timing.analysis;
    j["convergence_seconds"] = r.timing.convergence;
    j["total_seconds"] = r.timing.total;
    return j.dump(2) + "\n";
}

std::string resolve_output(const std::string& output) {
    fs::path p(output);
    if (p.is_absolute()) return p.string();
    if (const char* root = std::getenv("LINFEST_OUTPUT_ROOT"); root && *root) return (fs::path(root) / p).string();
    return p.string();
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericError("cannot write " + path.string());
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_reports(const RunReport& r, const fs::path& dir) {
    write_text(dir / "report.json", report_json(r));
    write_text(dir / "checks.csv", checks_csv(r));
    write_text(dir / "sweep.csv", sweep_csv(r));
    write_text(dir / "timing.json", timing_json(r));
}

}  // namespace

RunReport run_to_directory(const ScenarioConfig& c, const std::string& dir) {
    const auto t0 = Clock::now();
    validate(c);
    const fs::path out(dir);
    fs::create_directories(out);
    write_text(out / "scenario.json", to_json(c) + "\n");
    RunReport report;
    report.hash = scenario_hash(c);
    report.name = c.name;
    SolvedFields fields;
    bool solved = false;
    try {
        const auto t = Clock::now();
        fields = solve_stage(c);
        report.timing.solve = since(t);
        solved = true;
        report.summary.b = fields.b;
        report.summary.newton_iterations = fields.solve.iterations;
        geom::write_field((out / "phi.field").string(), fields.phi);
        geom::write_field((out / "forcing.field").string(), fields.F);
        geom::write_field((out / "omega.field").string(), fields.omega);
        write_text(out / "solve.json", pde::to_json(fields.solve, false) + "\n");
    } catch (const Error& e) {
        report.status = RunStatus::NumericFailure;
        report.error = e.what();
    }
    if (solved) {
        // Convergence blocks come from run(); the directory form reuses the solved fields.
        try {
            const auto t = Clock::now();
            analyze(c, fields, report);
            report.timing.analysis = since(t);
            if (!c.resolutions.empty()) {
                const RunReport full = run(c);
                report.convergence = full.convergence;
                report.timing.convergence = full.timing.convergence;
            }
        } catch (const Error& e) {
            report.status = RunStatus::NumericFailure;
            report.error = e.what();
        }
    }
    finalize_status(report);
    report.timing.total = since(t0);
    write_reports(report, out);
    return report;
}

RunReport verify(const std::string& dir, const std::vector<std::string>& checks) {
    const fs::path in(dir);
    ScenarioConfig c = parse_scenario(read_text(in / "scenario.json"));
    RunReport report;
    report.hash = scenario_hash(c);
    if (!checks.empty()) c.checks = checks;
    validate(c);
    report.name = c.name;
    const auto t0 = Clock::now();
    try {
        SolvedFields f;
        f.phi = geom::read_scalar_field((in / "phi.field").string());
        f.F = geom::read_scalar_field((in / "forcing.field").string());
        f.omega = geom::read_hermitian_field((in / "omega.field").string());
        analyze(c, f, report);
    } catch (const Error& e) {
        report.status = RunStatus::NumericFailure;
        report.error = e.what();
    }
    finalize_status(report);
    report.timing.analysis = report.timing.total = since(t0);
    return report;
}

std::vector<RunReport> run_members(const std::vector<ScenarioConfig>& members, int workers,
                                   const std::string& dir) {
    for (const auto& m : members) validate(m);
    std::vector<RunReport> out(members.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < members.size(); i = next++) {
            out[i] = dir.empty() ? run(members[i])
                                 : run_to_directory(members[i], (fs::path(dir) / members[i].name).string());
        }
    };
    const int w = std::max(1, std::min<int>(workers, static_cast<int>(members.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < w; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return out;
}

EntropyTable tabulate(const std::vector<ScenarioConfig>& members, const std::vector<RunReport>& reports) {
    EntropyTable t;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const RunReport& r = reports[i];
        EntropyRow row;
        row.hash = r.hash;
        row.name = r.name;
        row.amplitude = members[i].forcing.amplitude;
        row.entropy = r.summary.entropy;
        row.mass = r.summary.mass;
        row.sup_abs_phi = r.summary.sup_abs_phi;
        row.certificate_log = r.summary.certificate_log;
        row.C0_fit = r.summary.C0_fit;
        row.c0 = r.summary.c0;
        row.status = status_name(r.status);
        t.rows.push_back(row);
    }
    std::sort(t.rows.begin(), t.rows.end(), [](const EntropyRow& a, const EntropyRow& b) {
        return a.hash != b.hash ? a.hash < b.hash : a.name < b.name;
    });
    int pairs = 0, agree = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const EntropyRow& a = t.rows[i];
        if (a.status == "numeric_failure") continue;
        if (a.sup_abs_phi > 0.0 && std::log(a.sup_abs_phi) > a.certificate_log) t.dominated = false;
        for (std::size_t j = i + 1; j < t.rows.size(); ++j) {
            const EntropyRow& b = t.rows[j];
            if (b.status == "numeric_failure") continue;
            if (std::abs(a.entropy - b.entropy) <= 0.02 * std::max(a.entropy, b.entropy)) {
                const double lo = std::min(a.sup_abs_phi, b.sup_abs_phi), hi = std::max(a.sup_abs_phi, b.sup_abs_phi);
                t.max_group_spread = std::max(t.max_group_spread, lo > 0.0 ? hi / lo : (hi > 0.0 ? INFINITY : 1.0));
                continue;
            }
            ++pairs;
            if ((a.entropy < b.entropy) == (a.sup_abs_phi <= b.sup_abs_phi)) ++agree;
        }
    }
    t.concordance = pairs ? double(agree) / pairs : 1.0;
    return t;
}

EntropyTable sweep_entropy(const ScenarioConfig& base, const std::vector<double>& amplitudes, int workers,
                           const std::string& dir) {
    std::vector<ScenarioConfig> members;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        ScenarioConfig m = base;
        m.forcing.amplitude = amplitudes[i];
        m.name = base.name + "_a" + std::to_string(i);
        m.resolutions.clear();
        members.push_back(m);
    }
    const EntropyTable t = tabulate(members, run_members(members, workers, dir));
    if (!dir.empty()) {
        write_text(fs::path(dir) / "entropy.csv", to_csv(t));
        write_text(fs::path(dir) / "entropy.json", to_json(t));
    }
    return t;
}

std::string to_csv(const EntropyTable& t) {
    std::string out = "hash,name,amplitude,entropy,mass,sup_abs_phi,certificate_log,C0_fit,c0,status\n";
    for (const auto& r : t.rows)
        out += r.hash + "," + r.name + "," + fmt(r.amplitude) + "," + fmt(r.entropy) + "," + fmt(r.mass) + "," +
               fmt(r.sup_abs_phi) + "," + fmt(r.certificate_log) + "," + fmt(r.C0_fit) + "," + fmt(r.c0) + "," +
               r.status + "\n";
    return out;
}

EntropyTable parse_entropy_csv(const std::string& text) {
    EntropyTable t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParameterError("empty entropy table");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
        if (f.size() != 10) throw ParameterError("entropy table row needs 10 fields");
        EntropyRow r;
        r.hash = f[0];
        r.name = f[1];
        r.amplitude = std::strtod(f[2].c_str(), nullptr);
        r.entropy = std::strtod(f[3].c_str(), nullptr);
        r.mass = std::strtod(f[4].c_str(), nullptr);
        r.sup_abs_phi = std::strtod(f[5].c_str(), nullptr);
        r.certificate_log = std::strtod(f[6].c_str(), nullptr);
        r.C0_fit = std::strtod(f[7].c_str(), nullptr);
        r.c0 = std::strtod(f[8].c_str(), nullptr);
        r.status = f[9];
        t.rows.push_back(r);
    }
    return t;
}

std::string to_json(const EntropyTable& t) {
    ojson j;
    j["concordance"] = t.concordance;
    j["max_group_spread"] = num(t.max_group_spread);
    j["dominated"] = t.dominated;
    j["rows"] = ojson::array();
    for (const auto& r : t.rows)
        j["rows"].push_back({{"hash", r.hash},
                             {"name", r.name},
                             {"amplitude", num(r.amplitude)},
                             {"entropy", num(r.entropy)},
                             {"mass", num(r.mass)},
                             {"sup_abs_phi", num(r.sup_abs_phi)},
                             {"certificate_log", num(r.certificate_log)},
                             {"C0_fit", num(r.C0_fit)},
                             {"c0", num(r.c0)},
                             {"status", r.status}});
    return j.dump(2) + "\n";
}

}  // namespace linfest::exp
