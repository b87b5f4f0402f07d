#include "patchide/cli.hpp"

#include "patchide/errors.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

namespace patchide {

std::optional<Command> parse_command(const std::string& name) {
  if (name == "simulate") return Command::Simulate;
  if (name == "eigen") return Command::Eigen;
  if (name == "threshold") return Command::Threshold;
  if (name == "verify") return Command::Verify;
  return std::nullopt;
}

namespace {

std::string_view command_name(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Eigen: return "eigen";
    case Command::Threshold: return "threshold";
    case Command::Verify: return "verify";
  }
  return "?";
}

struct Model {
  KernelSpec kernel;
  GrowthFunction growth;
  Grid grid;
  DiscreteOperator op;

  explicit Model(const ScenarioConfig& c)
      : kernel(c.kernel()),
        growth(c.growth_function()),
        grid(build_grid(kernel.partition(), c.panels_per_patch, c.gauss_order)),
        op(assemble_operator(kernel, grid)) {}
};

nlohmann::json base_summary(Command command, const ScenarioConfig& config) {
  return {{"tool", {{"name", std::string(tool_name)}, {"version", std::string(tool_version)}}},
          {"command", std::string(command_name(command))},
          {"config_hash", config_hash(config)},
          {"scenario", to_json(config)}};
}

class CheckList {
 public:
  void add(std::string name, bool passed, std::string detail = {}, bool advisory = false) {
    if (!passed && !advisory) all_passed_ = false;
    json_.push_back({{"name", std::move(name)},
                     {"passed", passed},
                     {"advisory", advisory},
                     {"detail", std::move(detail)}});
  }
  bool all_passed() const { return all_passed_; }
  const nlohmann::json& json() const { return json_; }

 private:
  nlohmann::json json_ = nlohmann::json::array();
  bool all_passed_ = true;
};

void eigen_command(const ScenarioConfig& config, Artifacts& a) {
  const Model m(config);
  const auto pair = principal_eigen(m.op, m.growth.r0(), config.eigen_options());
  a.summary["eigen"] = to_json(pair);
  a.summary["spectral_lower_bound"] = to_json(check_spectral_lower_bound(pair, m.kernel, m.growth.r0()));
  a.summary["mortality"] = to_json(check_mortality_regime(m.op, m.growth, m.grid, config.eigen_options()));
  a.summary["regime"] = std::string(to_string(classify_regime(pair.lambda0, m.growth)));
  a.tables.emplace_back("eigenfunction.csv", profile_csv(m.grid, pair.phi0, "phi0"));
}

void simulate_command(const ScenarioConfig& config, Artifacts& a) {
  const Model m(config);
  const auto pair = principal_eigen(m.op, m.growth.r0(), config.eigen_options());
  const auto report = solve_stationary(m.op, m.growth, pair, config.solve_options());
  a.summary["eigen"] = to_json(pair);
  a.summary["stationary"] = to_json(report);
  a.summary["regime"] = std::string(to_string(report.regime));
  a.tables.emplace_back("profile.csv", profile_csv(m.grid, report.stationary, "w"));
  a.tables.emplace_back("norms.csv", norms_csv(report.downward));
  if (!report.upward.iterates.empty()) {
    a.tables.emplace_back("norms_upward.csv", norms_csv(report.upward));
  }
  if (config.output.full_history) {
    a.tables.emplace_back("iterates_downward.csv", iterates_csv(report.downward, m.grid));
    if (!report.upward.iterates.empty()) {
      a.tables.emplace_back("iterates_upward.csv", iterates_csv(report.upward, m.grid));
    }
  }
}

void threshold_command(const ScenarioConfig& config, Artifacts& a) {
  const Model m(config);
  const auto crit = critical_r0(m.op, 1e-9, config.eigen_options());
  a.summary["critical_r0"] = {
      {"r0_star", crit.r0_star}, {"rho", crit.rho}, {"check_lambda0", crit.check_lambda0}};
  if (config.threshold) {
    const auto table = sweep(config.scenario(), *config.threshold);
    a.summary["sweep"] = to_json(table);
    a.tables.emplace_back("phase.csv", phase_csv(table));
  }
}

template <typename F>
void guarded(CheckList& checks, const std::string& name, F&& f) {
  try {
    f();
  } catch (const NoConvergence&) {
    throw;
  } catch (const Error& e) {
    checks.add(name, false, e.what());
  }
}

bool verify_command(const ScenarioConfig& config, Artifacts& a) {
  const Model m(config);
  CheckList checks;

  const auto assumptions = validate_assumptions(m.kernel, m.growth, config.verify.sample_count);
  for (const auto& c : assumptions.checks) checks.add(c.name, c.passed, c.witness, c.advisory);

  const auto eigen_opts = config.eigen_options();
  const auto pair = principal_eigen(m.op, m.growth.r0(), eigen_opts);
  a.summary["eigen"] = to_json(pair);
  checks.add("eigen_residual", pair.residual <= eigen_opts.tol,
             fmt::format("residual {} vs tol {}", pair.residual, eigen_opts.tol));

  const auto bound = check_spectral_lower_bound(pair, m.kernel, m.growth.r0());
  checks.add("spectral_lower_bound", bound.satisfied,
             fmt::format("lambda0 {} vs r0*delta*|Omega| {}", bound.lambda0, bound.lower_bound));
  checks.add("phi0_positivity", bound.phi0_positivity_satisfied,
             fmt::format("min phi0 {} vs bound {}", bound.phi0_min, bound.phi0_min_bound));

  const auto mortality = check_mortality_regime(m.op, m.growth, m.grid, eigen_opts);
  a.summary["mortality"] = to_json(mortality);
  checks.add("mortality_regime", !mortality.hypotheses_hold || mortality.confirmed,
             mortality.hypotheses_hold
                 ? fmt::format("hypotheses hold; lambda0 {}", *mortality.lambda0)
                 : fmt::format("not applicable (max kernel mass {}, r0 {})",
                               mortality.max_kernel_mass, m.growth.r0()));

  const auto regime = classify_regime(pair.lambda0, m.growth);
  a.summary["regime"] = std::string(to_string(regime));

  guarded(checks, "stationary_solve", [&] {
    const auto report = solve_stationary(m.op, m.growth, pair, config.solve_options());
    a.summary["stationary"] = to_json(report);
    const auto& d = report.diagnostics;
    checks.add("bracket_ordering", d.ordered(),
               fmt::format("order {}, downward {}, upward {}", d.order_violation,
                           d.downward_monotone_violation, d.upward_monotone_violation));
    checks.add("stationary_residual", report.residual_sup <= config.tolerances.stationary_tol ||
                                           report.regime == Regime::Extinction,
               fmt::format("|T(w) - w| = {}", report.residual_sup));
    if (report.regime != Regime::Extinction) {
      checks.add("stationary_positivity",
                 report.stationary.minCoeff() >= report.positivity_bound - 1e-12,
                 fmt::format("min w {} vs delta * integral F(w) {}", report.stationary.minCoeff(),
                             report.positivity_bound));
    }
    const double norm_violation = std::max(report.downward.norm_consistency_violation,
                                           report.upward.norm_consistency_violation);
    checks.add("norm_consistency", norm_violation <= 1e-12,
               fmt::format("max l2 - sqrt(|Omega|) sup = {}", norm_violation));
  });

  guarded(checks, "comparison_short_run", [&] {
    constexpr int generations = 3;
    const auto super = super_solution_start(m.op, m.growth);
    Vector lower = Vector::Zero(m.op.size());
    if (regime == Regime::Persistence) lower = sub_solution_start(pair, m.op, m.growth).profile;
    Vector u = super.profile;
    Vector v = lower;
    for (int n = 0; n < generations; ++n) {
      u = apply_T(m.op, m.growth, u);
      v = apply_T(m.op, m.growth, v);
    }
    const auto cmp = comparison_check(m.op, m.growth, u, v, 1e-13);
    checks.add("comparison_short_run", cmp.passed,
               fmt::format("max(v - u) after {} generations = {}", generations, cmp.max_violation));
  });

  if (regime != Regime::Extinction) {
    guarded(checks, "uniqueness_probe", [&] {
      UniquenessOptions opts;
      opts.seeds = config.verify.uniqueness_seeds;
      opts.tol = config.verify.uniqueness_tol;
      opts.iteration_tol = config.verify.uniqueness_tol * 1e-3;
      opts.max_gen = config.tolerances.max_generations;
      opts.rng_seed = config.seed;
      const auto probe = uniqueness_probe(m.op, m.growth, opts);
      checks.add("uniqueness_probe", true,
                 fmt::format("{} seeds, max pairwise gap {}, rng seed {}", probe.limits.size(),
                             probe.max_pairwise_gap, probe.rng_seed));
    });
  }

  a.summary["checks"] = checks.json();
  a.summary["all_passed"] = checks.all_passed();
  return checks.all_passed();
}

}  // namespace

Artifacts build_artifacts(Command command, const ScenarioConfig& config, int& status) {
  Artifacts a;
  a.summary = base_summary(command, config);
  status = exit_ok;
  switch (command) {
    case Command::Eigen: eigen_command(config, a); break;
    case Command::Simulate: simulate_command(config, a); break;
    case Command::Threshold: threshold_command(config, a); break;
    case Command::Verify:
      if (!verify_command(config, a)) status = exit_invariant_violation;
      break;
  }
  return a;
}

int run_command(Command command, ScenarioConfig config, const RunFlags& flags, std::ostream& out,
                std::ostream& err) {
  if (flags.out_dir) config.output.directory = *flags.out_dir;
  try {
    int status = exit_ok;
    const auto artifacts = build_artifacts(command, config, status);
    const auto written = emit_reports(artifacts, config);
    if (!flags.quiet) {
      const auto& s = artifacts.summary;
      out << fmt::format("{}: {}", command_name(command), config.name);
      if (s.contains("eigen")) out << fmt::format(", lambda0 = {}", s["eigen"]["lambda0"].get<double>());
      if (s.contains("regime")) out << fmt::format(", regime {}", s["regime"].get<std::string>());
      if (s.contains("all_passed")) {
        out << (s["all_passed"].get<bool>() ? ", all checks passed" : ", CHECKS FAILED");
      }
      out << fmt::format("\nwrote {} files to {}\n", written.size(), config.output.directory);
    }
    return status;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_no_convergence;
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << '\n';
    return exit_invariant_violation;
  } catch (const ValidationError& e) {
    err << e.what() << '\n';
    return exit_config_error;
  } catch (const InvalidModel& e) {
    err << "invalid model: " << e.what() << '\n';
    return exit_config_error;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Patchy-landscape integro-difference model: eigenpairs, stationary states, "
               "thresholds and invariant checks"};
  app.set_version_flag("--version", std::string(tool_version));
  std::string command;
  std::string config_path;
  std::string out_dir;
  bool quiet = false;
  app.add_option("command", command, "simulate | eigen | threshold | verify")
      ->required()
      ->check(CLI::IsMember({"simulate", "eigen", "threshold", "verify"}));
  app.add_option("--config", config_path, "scenario file (YAML)")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.directory)");
  app.add_flag("--quiet", quiet, "suppress the summary on stdout");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config_error;
  }

  ScenarioConfig config;
  try {
    config = load_config(config_path);
  } catch (const ParseError& e) {
    std::cerr << e.what() << '\n';
    return exit_config_error;
  } catch (const ValidationError& e) {
    std::cerr << e.what() << '\n';
    return exit_config_error;
  } catch (const IoError& e) {
    std::cerr << e.what() << '\n';
    return exit_config_error;
  }
  RunFlags flags;
  if (!out_dir.empty()) flags.out_dir = out_dir;
  flags.quiet = quiet;
  return run_command(*parse_command(command), std::move(config), flags, std::cout, std::cerr);
}

}  // namespace patchide
