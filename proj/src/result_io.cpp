#include "num/result_io.hpp"

#include <fstream>

namespace num {

using nlohmann::json;

json md_result_to_json(const std::string& algorithm, const MdReport& report) {
  return json{{"algorithm", algorithm},
              {"eps", report.eps},
              {"theta0", report.theta0_used},
              {"mode", to_string(report.mode)},
              {"iters", report.total_iters},
              {"productive", report.productive_count},
              {"unproductive", report.unproductive_count},
              {"objective", report.objective},
              {"utility", report.utility},
              {"max_violation", report.max_violation},
              {"wall_time_ms", report.wall_time_ms},
              {"stop_reason", to_string(report.stop_reason)},
              {"solution", report.solution}};
}

json em_result_to_json(const EmReport& report, double eps) {
  long long productive = 0;
  for (const auto& h : report.history) productive += h.productive ? 1 : 0;
  return json{{"algorithm", "em"},
              {"eps", eps},
              {"theta0", nullptr},
              {"mode", nullptr},
              {"iters", report.iterations},
              {"productive", productive},
              {"unproductive", report.iterations - productive},
              {"objective", -report.primal_utility},
              {"utility", report.primal_utility},
              {"max_violation", report.max_violation},
              {"wall_time_ms", report.wall_time_ms},
              {"stop_reason", to_string(report.stop_reason)},
              {"solution", report.recovered_x},
              {"lambda", report.lambda},
              {"dual_value", report.dual_value},
              {"gap", report.gap},
              {"violation_norm", report.violation_norm},
              {"certificate_support", report.certificate_support}};
}

void write_result(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write result file: " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace num
