#pragma once

#include "patchide/landscape.hpp"
#include "patchide/threshold.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace patchide {

struct GrowthConfig {
  std::string variant = "beverton_holt";  // or beverton_holt_with_influx
  double r0 = 2;
  double b = 1;
  double c = 0;  // influx variant only

  bool operator==(const GrowthConfig&) const = default;
};

struct ToleranceConfig {
  double eigen_tol = 1e-12;
  int eigen_max_iter = 100000;
  double stationary_tol = 1e-10;
  double extinction_threshold = 1e-12;
  int max_generations = 100000;

  bool operator==(const ToleranceConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats = {"json", "csv"};
  bool full_history = false;

  bool operator==(const OutputConfig&) const = default;
};

struct VerifyConfig {
  int sample_count = 16;
  int uniqueness_seeds = 5;
  double uniqueness_tol = 1e-8;

  bool operator==(const VerifyConfig&) const = default;
};

/// One fully defaulted scenario file.
struct ScenarioConfig {
  std::string name = "scenario";
  double half_length = 0;
  std::vector<double> interfaces;
  double delta = 0;
  double lambda_bound = 0;
  std::vector<KernelPiece> pieces;  // row-major over patch pairs
  GrowthConfig growth;
  int panels_per_patch = 4;
  int gauss_order = 4;
  ToleranceConfig tolerances;
  OutputConfig output;
  std::uint64_t seed = 20211014;
  VerifyConfig verify;
  std::optional<SweepSpec> threshold;

  bool operator==(const ScenarioConfig&) const = default;

  PatchPartition partition() const;
  KernelSpec kernel() const;
  GrowthFunction growth_function() const;
  EigenOptions eigen_options() const;
  SolveOptions solve_options() const;
  Scenario scenario() const;
};

/// Parses and validates a YAML scenario. Unknown keys, missing required
/// fields and out-of-range values are all collected into one
/// ValidationError; malformed YAML raises ParseError.
ScenarioConfig parse_config(const std::string& text);

/// Reads `path` (IoError if unreadable) and calls parse_config.
ScenarioConfig load_config(const std::string& path);

/// Canonical YAML echo of the effective configuration; parse_config of the
/// result reproduces the same ScenarioConfig.
std::string to_yaml(const ScenarioConfig& config);

/// FNV-1a 64 of the canonical echo, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

}  // namespace patchide
