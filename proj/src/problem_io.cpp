#include "num/problem_io.hpp"

#include <fstream>
#include <stdexcept>

namespace num {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end())
    throw std::invalid_argument(std::string("problem file: missing field \"") + key + "\"");
  return *it;
}

}  // namespace

NumProblem problem_from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("problem file: top level must be an object");
  const long long n = require(doc, "n").get<long long>();
  const long long m = require(doc, "m").get<long long>();
  if (n < 1) throw std::invalid_argument("problem file: n must be >= 1");
  if (m < 1) throw std::invalid_argument("problem file: m must be >= 1");

  const json& jrows = require(doc, "rows");
  if (!jrows.is_array() || static_cast<long long>(jrows.size()) != m)
    throw std::invalid_argument("problem file: \"rows\" must be an array of m = " +
                                std::to_string(m) + " rows");
  std::vector<std::vector<int>> rows;
  rows.reserve(jrows.size());
  for (const auto& r : jrows) {
    if (!r.is_array()) throw std::invalid_argument("problem file: each row must be an array");
    rows.push_back(r.get<std::vector<int>>());
  }

  const json& jb = require(doc, "b");
  if (!jb.is_array() || static_cast<long long>(jb.size()) != m)
    throw std::invalid_argument("problem file: \"b\" must be an array of m = " +
                                std::to_string(m) + " capacities");
  Vec b = jb.get<Vec>();

  const json& ju = require(doc, "utility");
  const std::string kind = require(ju, "kind").get<std::string>();
  UtilitySpec utility;
  if (kind == "log") {
    utility = UtilitySpec::log_utility();
  } else if (kind == "weighted_log") {
    utility = UtilitySpec::weighted_log(require(ju, "weights").get<Vec>());
  } else if (kind == "power") {
    utility = UtilitySpec::power(require(ju, "alpha").get<double>());
  } else {
    throw std::invalid_argument("problem file: unknown utility kind \"" + kind + "\"");
  }

  RoutingMatrix routing(static_cast<std::size_t>(n), std::move(rows));
  return NumProblem(std::move(routing), std::move(b), std::move(utility));
}

json problem_to_json(const NumProblem& p, std::optional<std::uint64_t> seed) {
  json ju{{"kind", p.utility().kind_name()}};
  if (p.utility().kind == UtilityKind::WeightedLog) ju["weights"] = p.utility().weights;
  if (p.utility().kind == UtilityKind::Power) ju["alpha"] = p.utility().alpha;
  json doc{{"n", p.users()},
           {"m", p.links()},
           {"rows", p.routing().rows()},
           {"b", p.capacities()},
           {"utility", ju}};
  if (seed) doc["seed"] = *seed;
  return doc;
}

NumProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open problem file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::invalid_argument("problem file " + path.string() + ": " + e.what());
  }
  return problem_from_json(doc);
}

void save_problem(const std::filesystem::path& path, const NumProblem& p,
                  std::optional<std::uint64_t> seed) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write problem file: " + path.string());
  out << problem_to_json(p, seed).dump(2) << '\n';
}

}  // namespace num
