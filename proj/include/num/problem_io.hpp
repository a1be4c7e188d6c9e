#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "num/problem.hpp"

namespace num {

/// Instance file schema (0-based indices throughout):
///   {"n": int, "m": int, "rows": [[user indices]], "b": [reals],
///    "utility": {"kind": "log"|"weighted_log"|"power",
///                "weights"?: [reals], "alpha"?: real},
///    "seed"?: int}
/// The loader validates every invariant and throws std::invalid_argument
/// naming the first violated one.
NumProblem problem_from_json(const nlohmann::json& doc);
nlohmann::json problem_to_json(const NumProblem& p,
                               std::optional<std::uint64_t> seed = std::nullopt);

NumProblem load_problem(const std::filesystem::path& path);
void save_problem(const std::filesystem::path& path, const NumProblem& p,
                  std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace num
