#include "num/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "num/ellipsoid.hpp"

namespace num {

using nlohmann::json;

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  if (s == "markdown") return ReportFormat::Markdown;
  throw std::invalid_argument("unknown report format \"" + s + "\" (csv|json|markdown)");
}

void BenchConfig::validate() const {
  if (grid.empty()) throw std::invalid_argument("bench config: grid must be nonempty");
  for (const auto& cell : grid) {
    if (cell.n < 1 || cell.m < 1)
      throw std::invalid_argument("bench config: grid cells need n, m >= 1");
    if (!(cell.eps > 0.0)) throw std::invalid_argument("bench config: grid cells need eps > 0");
  }
  if (repetitions < 1) throw std::invalid_argument("bench config: repetitions must be >= 1");
  if (parallel < 1) throw std::invalid_argument("bench config: parallel must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("bench config: p must lie in (0,1)");
  if (!(b_min > 0.0 && b_min <= b_max))
    throw std::invalid_argument("bench config: need 0 < b_min <= b_max");
}

namespace {

MdMode mode_from_string(const std::string& s) {
  if (s == "standard") return MdMode::Standard;
  if (s == "log-shift" || s == "log_shift") return MdMode::LogShift;
  throw std::invalid_argument("unknown mode \"" + s + "\" (standard|log-shift)");
}

MdToggle md_toggle_from_json(const json& doc, bool default_enabled) {
  MdToggle t;
  t.enabled = doc.value("enabled", default_enabled);
  if (doc.contains("theta0")) t.theta0 = doc.at("theta0").get<double>();
  if (doc.contains("mode")) t.mode = mode_from_string(doc.at("mode").get<std::string>());
  return t;
}

}  // namespace

BenchConfig bench_config_from_json(const json& doc) {
  BenchConfig cfg;
  cfg.grid.clear();
  for (const auto& cell : doc.at("grid"))
    cfg.grid.push_back({cell.at("n").get<int>(), cell.at("m").get<int>(),
                        cell.at("eps").get<double>()});
  cfg.repetitions = doc.value("repetitions", 1);
  cfg.p = doc.value("p", 0.5);
  cfg.b_min = doc.value("b_min", 0.1);
  cfg.b_max = doc.value("b_max", 0.4);
  cfg.seed = doc.value("seed", std::uint64_t{0});
  cfg.parallel = doc.value("parallel", 1);
  if (doc.contains("format"))
    cfg.format = report_format_from_string(doc.at("format").get<std::string>());
  if (doc.contains("algorithms")) {
    const json& algos = doc.at("algorithms");
    if (algos.contains("md1")) cfg.md1 = md_toggle_from_json(algos.at("md1"), false);
    if (algos.contains("md2")) cfg.md2 = md_toggle_from_json(algos.at("md2"), true);
    if (algos.contains("em")) {
      const json& em = algos.at("em");
      cfg.em.enabled = em.value("enabled", true);
      if (em.contains("radius")) cfg.em.radius = em.at("radius").get<double>();
    }
  }
  cfg.validate();
  return cfg;
}

std::uint64_t bench_instance_seed(std::uint64_t base, std::size_t cell, int rep) {
  // splitmix64 of the packed (base, cell, rep) triple
  std::uint64_t z = base ^ (static_cast<std::uint64_t>(cell) << 32 ^
                            static_cast<std::uint64_t>(static_cast<unsigned>(rep)));
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

ResultRecord base_record(const BenchConfig& cfg, const BenchCell& cell, std::uint64_t seed,
                         const char* algo) {
  ResultRecord r;
  r.n = cell.n;
  r.m = cell.m;
  r.eps = cell.eps;
  r.p = cfg.p;
  r.b_min = cfg.b_min;
  r.b_max = cfg.b_max;
  r.seed = seed;
  r.algorithm = algo;
  return r;
}

void fill_failure(ResultRecord& r, const std::string& what) {
  r.iterations = 0;
  r.wall_time_ms = std::numeric_limits<double>::quiet_NaN();
  r.objective = std::numeric_limits<double>::quiet_NaN();
  r.utility = std::numeric_limits<double>::quiet_NaN();
  r.max_violation = std::numeric_limits<double>::quiet_NaN();
  r.stop_reason = "error: " + what;
}

std::vector<ResultRecord> run_job(const BenchConfig& cfg, const BenchCell& cell,
                                  std::uint64_t seed) {
  std::vector<ResultRecord> out;
  std::optional<NumProblem> problem;
  std::string gen_error;
  try {
    InstanceSpec spec;
    spec.n = cell.n;
    spec.m = cell.m;
    spec.p = cfg.p;
    spec.b_min = cfg.b_min;
    spec.b_max = cfg.b_max;
    spec.seed = seed;
    problem.emplace(generate_instance(spec));
  } catch (const std::exception& e) {
    gen_error = e.what();
  }

  auto run_md = [&](const char* name, const MdToggle& toggle, bool adaptive) {
    if (!toggle.enabled) return;
    ResultRecord r = base_record(cfg, cell, seed, name);
    if (!problem) {
      fill_failure(r, gen_error);
    } else {
      try {
        MdConfig md;
        md.eps = cell.eps;
        md.theta0 = toggle.theta0;
        md.mode = toggle.mode;
        MdReport rep = adaptive ? run_md2(*problem, md) : run_md1(*problem, md);
        r.iterations = rep.total_iters;
        r.wall_time_ms = rep.wall_time_ms;
        r.objective = rep.objective;
        r.utility = rep.utility;
        r.max_violation = rep.max_violation;
        r.stop_reason = to_string(rep.stop_reason);
      } catch (const std::exception& e) {
        fill_failure(r, e.what());
      }
    }
    out.push_back(std::move(r));
  };
  run_md("md1", cfg.md1, false);
  run_md("md2", cfg.md2, true);

  if (cfg.em.enabled) {
    ResultRecord r = base_record(cfg, cell, seed, "em");
    if (!problem) {
      fill_failure(r, gen_error);
    } else {
      try {
        EmConfig em;
        em.eps = cell.eps;
        em.radius = cfg.em.radius;
        EmReport rep = em_run(*problem, em);
        r.iterations = rep.iterations;
        r.wall_time_ms = rep.wall_time_ms;
        r.objective = -rep.primal_utility;
        r.utility = rep.primal_utility;
        r.max_violation = rep.max_violation;
        r.stop_reason = to_string(rep.stop_reason);
      } catch (const std::exception& e) {
        fill_failure(r, e.what());
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<ResultRecord> run_bench(const BenchConfig& cfg) {
  cfg.validate();
  struct Job {
    std::size_t cell;
    int rep;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cfg.grid.size(); ++c)
    for (int r = 0; r < cfg.repetitions; ++r) jobs.push_back({c, r});

  std::vector<std::vector<ResultRecord>> slots(jobs.size());
  if (cfg.parallel <= 1 || jobs.size() <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i)
      slots[i] = run_job(cfg, cfg.grid[jobs[i].cell],
                         bench_instance_seed(cfg.seed, jobs[i].cell, jobs[i].rep));
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        slots[i] = run_job(cfg, cfg.grid[jobs[i].cell],
                           bench_instance_seed(cfg.seed, jobs[i].cell, jobs[i].rep));
      }
    };
    std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.parallel),
                                                  jobs.size());
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<ResultRecord> records;
  for (auto& slot : slots)
    for (auto& r : slot) records.push_back(std::move(r));
  return records;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  return s;
}

constexpr const char* kCsvHeader =
    "n,m,eps,p,b_min,b_max,seed,algorithm,iterations,wall_time_ms,objective,utility,"
    "max_violation,stop_reason";

std::string emit_csv(std::span<const ResultRecord> records) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.n << ',' << r.m << ',' << fmt_double(r.eps) << ',' << fmt_double(r.p) << ','
        << fmt_double(r.b_min) << ',' << fmt_double(r.b_max) << ',' << r.seed << ','
        << r.algorithm << ',' << r.iterations << ',' << fmt_double(r.wall_time_ms) << ','
        << fmt_double(r.objective) << ',' << fmt_double(r.utility) << ','
        << fmt_double(r.max_violation) << ',' << csv_safe(r.stop_reason) << '\n';
  }
  return out.str();
}

std::string emit_markdown(std::span<const ResultRecord> records) {
  // Per-eps tables, one column per (n, m) cell, Iter/Time rows per algorithm.
  std::map<double, std::map<std::pair<int, int>,
                            std::map<std::string, std::pair<double, double>>>>
      cells;  // eps -> (n,m) -> algo -> (sum iters, sum ms) ; counts tracked below
  std::map<double, std::map<std::pair<int, int>, std::map<std::string, int>>> counts;
  for (const auto& r : records) {
    auto& acc = cells[r.eps][{r.n, r.m}][r.algorithm];
    acc.first += static_cast<double>(r.iterations);
    acc.second += r.wall_time_ms;
    counts[r.eps][{r.n, r.m}][r.algorithm] += 1;
  }
  std::ostringstream out;
  for (const auto& [eps, grid] : cells) {
    out << "### eps = " << fmt_double(eps) << "\n\n";
    std::vector<std::pair<int, int>> keys;
    std::vector<std::string> algos;
    for (const auto& [key, per_algo] : grid) {
      keys.push_back(key);
      for (const auto& [algo, _] : per_algo)
        if (std::find(algos.begin(), algos.end(), algo) == algos.end())
          algos.push_back(algo);
    }
    std::sort(algos.begin(), algos.end());
    out << "| algorithm | metric |";
    for (auto [n, m] : keys) out << " n=" << n << ", m=" << m << " |";
    out << "\n|---|---|";
    for (std::size_t i = 0; i < keys.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& algo : algos) {
      out << "| " << algo << " | Iter |";
      for (auto key : keys) {
        auto it = grid.at(key).find(algo);
        if (it == grid.at(key).end()) {
          out << " — |";
        } else {
          double c = counts.at(eps).at(key).at(algo);
          out << ' ' << static_cast<long long>(std::llround(it->second.first / c)) << " |";
        }
      }
      out << "\n| " << algo << " | Time, s |";
      for (auto key : keys) {
        auto it = grid.at(key).find(algo);
        if (it == grid.at(key).end()) {
          out << " — |";
        } else {
          double c = counts.at(eps).at(key).at(algo);
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.2f", it->second.second / c / 1000.0);
          out << ' ' << buf << " |";
        }
      }
      out << '\n';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

nlohmann::json records_to_json(std::span<const ResultRecord> records) {
  json arr = json::array();
  for (const auto& r : records) {
    arr.push_back(json{{"n", r.n},
                       {"m", r.m},
                       {"eps", r.eps},
                       {"p", r.p},
                       {"b_min", r.b_min},
                       {"b_max", r.b_max},
                       {"seed", r.seed},
                       {"algorithm", r.algorithm},
                       {"iterations", r.iterations},
                       {"wall_time_ms", r.wall_time_ms},
                       {"objective", r.objective},
                       {"utility", r.utility},
                       {"max_violation", r.max_violation},
                       {"stop_reason", r.stop_reason}});
  }
  return arr;
}

std::string emit_report(std::span<const ResultRecord> records, ReportFormat format) {
  if (records.empty())
    throw std::invalid_argument("emit_report: no records (run a sweep first)");
  switch (format) {
    case ReportFormat::Csv:
      return emit_csv(records);
    case ReportFormat::Json:
      return records_to_json(records).dump(2) + "\n";
    case ReportFormat::Markdown:
      return emit_markdown(records);
  }
  throw std::invalid_argument("emit_report: unknown format");
}

std::vector<ResultRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: empty input");
  if (line != kCsvHeader) throw std::invalid_argument("csv: unexpected header");
  std::vector<ResultRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 14) throw std::invalid_argument("csv: malformed record line");
    ResultRecord r;
    r.n = std::stoi(fields[0]);
    r.m = std::stoi(fields[1]);
    r.eps = std::stod(fields[2]);
    r.p = std::stod(fields[3]);
    r.b_min = std::stod(fields[4]);
    r.b_max = std::stod(fields[5]);
    r.seed = std::stoull(fields[6]);
    r.algorithm = fields[7];
    r.iterations = std::stoll(fields[8]);
    r.wall_time_ms = std::stod(fields[9]);
    r.objective = std::stod(fields[10]);
    r.utility = std::stod(fields[11]);
    r.max_violation = std::stod(fields[12]);
    r.stop_reason = fields[13];
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace num
