#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "num/generator.hpp"
#include "num/mirror_descent.hpp"

namespace num {

enum class ReportFormat { Csv, Json, Markdown };
ReportFormat report_format_from_string(const std::string& s);

struct BenchCell {
  int n = 0;
  int m = 0;
  double eps = 0.0;
};

struct MdToggle {
  bool enabled = false;
  std::optional<double> theta0;
  MdMode mode = MdMode::LogShift;
};

struct EmToggle {
  bool enabled = false;
  std::optional<double> radius;
};

/// Sweep configuration; JSON mirror documented in the README. Per-cell
/// instances come from generate_instance with the shared (p, b range, utility)
/// parameters and a seed derived deterministically from (seed, cell, rep).
struct BenchConfig {
  std::vector<BenchCell> grid;
  int repetitions = 1;
  MdToggle md1{};
  MdToggle md2{true, std::nullopt, MdMode::LogShift};
  EmToggle em{true, std::nullopt};
  double p = 0.5;
  double b_min = 0.1;
  double b_max = 0.4;
  std::uint64_t seed = 0;
  int parallel = 1;
  ReportFormat format = ReportFormat::Markdown;

  void validate() const;
};

BenchConfig bench_config_from_json(const nlohmann::json& doc);

/// One solver run on one generated instance. Failures are recorded as
/// stop_reason = "error: ..." with NaN measurements; they never abort a sweep.
struct ResultRecord {
  int n = 0;
  int m = 0;
  double eps = 0.0;
  double p = 0.0;
  double b_min = 0.0;
  double b_max = 0.0;
  std::uint64_t seed = 0;  // derived per-instance seed
  std::string algorithm;
  long long iterations = 0;
  double wall_time_ms = 0.0;
  double objective = 0.0;
  double utility = 0.0;
  double max_violation = 0.0;
  std::string stop_reason;
};

std::uint64_t bench_instance_seed(std::uint64_t base, std::size_t cell, int rep);

/// Runs every enabled algorithm on every (cell, repetition) instance. Cells
/// run concurrently when cfg.parallel > 1; records always come back in
/// (cell, repetition, algorithm) order.
std::vector<ResultRecord> run_bench(const BenchConfig& cfg);

/// csv: fixed header, one record per line, %.17g numbers. json: the record
/// list verbatim. markdown: per-eps tables with one Iter and one Time row per
/// algorithm and one column per (n, m) cell (means across repetitions).
std::string emit_report(std::span<const ResultRecord> records, ReportFormat format);

std::vector<ResultRecord> records_from_csv(const std::string& text);
nlohmann::json records_to_json(std::span<const ResultRecord> records);

}  // namespace num
