#pragma once

#include "patchide/config.hpp"
#include "patchide/report.hpp"

#include <optional>
#include <ostream>
#include <string>

namespace patchide {

enum class Command { Simulate, Eigen, Threshold, Verify };

std::optional<Command> parse_command(const std::string& name);

struct RunFlags {
  std::optional<std::string> out_dir;
  bool quiet = false;
};

// Process exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_no_convergence = 3;
inline constexpr int exit_invariant_violation = 4;

/// Runs one command and builds its artifacts without touching the file system.
/// `status` receives the exit status the command earns (exit_invariant_violation
/// for a failed verify). Library exceptions propagate.
Artifacts build_artifacts(Command command, const ScenarioConfig& config, int& status);

/// Runs a command, writes its reports and returns the process exit status.
/// Exceptions are mapped to exit codes and reported on `err`.
int run_command(Command command, ScenarioConfig config, const RunFlags& flags, std::ostream& out,
                std::ostream& err);

/// Entry point behind `patchide <command> --config <path> [--out <dir>] [--quiet]`.
int run_cli(int argc, char** argv);

}  // namespace patchide
