#include "linfest/check_record.hpp"

#include <cmath>

#include "json.hpp"

namespace linfest::lab {

namespace {

nlohmann::ordered_json as_json(const CheckRecord& r) {
    nlohmann::ordered_json j;
    j["check_id"] = r.check_id;
    j["instance_id"] = r.instance_id;
    j["residual"] = std::isfinite(r.residual) ? nlohmann::ordered_json(r.residual) : nlohmann::ordered_json(nullptr);
    j["slack"] = r.slack;
    j["pass"] = r.pass;
    return j;
}

}  // namespace

CheckRecord make_record(std::string check_id, std::string instance_id, double residual, double slack) {
    CheckRecord r{std::move(check_id), std::move(instance_id), residual, slack, false};
    r.pass = std::isfinite(residual) && residual <= slack;
    return r;
}

std::string to_json(const CheckRecord& r) { return as_json(r).dump(); }

std::string to_json(const std::vector<CheckRecord>& records) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& r : records) a.push_back(as_json(r));
    return a.dump(2);
}

}  // namespace linfest::lab
