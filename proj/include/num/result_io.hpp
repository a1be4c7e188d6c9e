#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "num/ellipsoid.hpp"
#include "num/mirror_descent.hpp"

namespace num {

/// Result schema shared by all solvers:
///   {"algorithm", "eps", "theta0", "mode", "iters", "productive",
///    "unproductive", "objective", "utility", "max_violation", "wall_time_ms",
///    "stop_reason", "solution"}
/// md-only fields are null on EM records, which add
///   {"lambda", "dual_value", "gap", "violation_norm", "certificate_support"}.
nlohmann::json md_result_to_json(const std::string& algorithm, const MdReport& report);
nlohmann::json em_result_to_json(const EmReport& report, double eps);

void write_result(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace num
