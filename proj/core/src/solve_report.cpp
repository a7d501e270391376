#include "linfest/solve_report.hpp"

#include "json.hpp"

namespace linfest::pde {

std::string to_json(const SolveReport& r, bool include_timing) {
    nlohmann::ordered_json j;
    const auto& mesh = *r.solution.mesh;
    j["geometry"] = mesh.is_torus() ? "torus" : "ball";
    j["n"] = mesh.n();
    j["m"] = mesh.m();
    j["spacing"] = mesh.spacing();
    j["converged"] = r.converged;
    j["residual_inf"] = r.residual_inf;
    j["iterations"] = r.iterations;
    j["krylov_iterations"] = r.krylov_iterations;
    j["b_constant"] = r.b_constant;
    j["cone_violations"] = r.cone_violations;
    j["cone_rejections"] = r.cone_rejections;
    j["mass"] = r.mass;
    j["min_eigenvalue"] = r.min_eigenvalue;
    j["history"] = r.history;
    if (include_timing) j["seconds"] = r.seconds;
    return j.dump(2);
}

}  // namespace linfest::pde
