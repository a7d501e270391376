#pragma once

#include <string>
#include <vector>

namespace linfest::lab {

// residual <= slack means the checked inequality holds.
struct CheckRecord {
    std::string check_id;
    std::string instance_id;
    double residual = 0.0;
    double slack = 0.0;
    bool pass = false;
};

CheckRecord make_record(std::string check_id, std::string instance_id, double residual, double slack);

std::string to_json(const CheckRecord& r);
std::string to_json(const std::vector<CheckRecord>& records);

}  // namespace linfest::lab
