#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "stowardrop/montecarlo.hpp"
#include "stowardrop/network.hpp"
#include "stowardrop/poa.hpp"
#include "stowardrop/solvers.hpp"

namespace stowardrop::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kInvalidInput = 2,
  kNotConverged = 3,
  kBoundNotApplicable = 4,
};

inline constexpr int kScenarioVersion = 1;

struct Scenario {
  Network network;
  SolverConfig solver;
};

/// Checks the document shape and builds the network; throws ValidationError.
[[nodiscard]] Scenario parse_scenario(const nlohmann::json& doc);

/// Parse failures become ValidationError carrying line and column.
[[nodiscard]] nlohmann::json parse_json_text(const std::string& text, const std::string& source);
[[nodiscard]] nlohmann::json read_json_file(const std::string& path);
[[nodiscard]] Scenario load_scenario(const std::string& path);

// Accepts solve-ue / solve-so output or a bare array of per-pair share arrays.
[[nodiscard]] Strategy parse_strategy(const nlohmann::json& doc, const Network& network);

[[nodiscard]] nlohmann::json to_json(const Network& network, const Strategy& strategy);
[[nodiscard]] nlohmann::json to_json(const Network& network, const EquilibriumResult& result);
[[nodiscard]] nlohmann::json to_json(const Network& network, const OptimumResult& result);
[[nodiscard]] nlohmann::json to_json(const BoundReport& report);
[[nodiscard]] nlohmann::json to_json(const Network& network, const PoAReport& report);
[[nodiscard]] nlohmann::json to_json(const McEstimate& estimate);

// 12 significant digits, '.' decimal, "inf" for infinities.
[[nodiscard]] std::string format_csv_number(double x);

/// Entry point behind the executable. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stowardrop::cli
