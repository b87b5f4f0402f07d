#pragma once

#include "patchide/config.hpp"
#include "patchide/dynamics.hpp"
#include "patchide/spectral.hpp"
#include "patchide/threshold.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace patchide {

inline constexpr std::string_view tool_name = "patchide";
inline constexpr std::string_view tool_version = "0.1.0";

/// Everything a command produces: one JSON summary plus named CSV tables.
struct Artifacts {
  nlohmann::json summary;
  std::vector<std::pair<std::string, std::string>> tables;  // file name, CSV text
};

/// Shortest round-trip decimal representation.
std::string format_number(double v);

std::string profile_csv(const Grid& grid, const Vector& values, std::string_view column);
std::string norms_csv(const Trajectory& trajectory);
std::string iterates_csv(const Trajectory& trajectory, const Grid& grid);
std::string phase_csv(const PhaseTable& table);

nlohmann::json to_json(const ScenarioConfig& config);
nlohmann::json to_json(const EigenPair& pair);
nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const MortalityReport& report);
nlohmann::json to_json(const RegimeReport& report);
nlohmann::json to_json(const PhaseTable& table);

/// Writes summary.json (format "json"), the CSV tables (format "csv") and the
/// effective config echo config.effective.yaml into config.output.directory.
/// Returns the written paths. Throws IoError with the offending path.
std::vector<std::string> emit_reports(const Artifacts& artifacts, const ScenarioConfig& config);

}  // namespace patchide
