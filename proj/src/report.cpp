#include "patchide/report.hpp"

#include "patchide/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace patchide {

std::string format_number(double v) { return fmt::format("{}", v); }

std::string profile_csv(const Grid& grid, const Vector& values, std::string_view column) {
  std::string out = fmt::format("x,{},patch_index\n", column);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    out += fmt::format("{},{},{}\n", format_number(grid.nodes(i)), format_number(values(i)),
                       grid.patch_of_node[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::string norms_csv(const Trajectory& t) {
  std::string out = "n,sup_diff,l2_diff\n";
  for (std::size_t n = 0; n < t.sup_diffs.size(); ++n) {
    out += fmt::format("{},{},{}\n", n, format_number(t.sup_diffs[n]), format_number(t.l2_diffs[n]));
  }
  return out;
}

std::string iterates_csv(const Trajectory& t, const Grid& grid) {
  std::string out = "n,node,x,u\n";
  for (std::size_t n = 0; n < t.iterates.size(); ++n) {
    const auto& u = t.iterates[n];
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      out += fmt::format("{},{},{},{}\n", n, i, format_number(grid.nodes(i)), format_number(u(i)));
    }
  }
  return out;
}

std::string phase_csv(const PhaseTable& table) {
  std::string out = fmt::format("{},lambda0,regime\n", to_string(table.parameter));
  for (const auto& row : table.rows) {
    out += fmt::format("{},{},{}\n", format_number(row.value), format_number(row.lambda0),
                       to_string(row.regime));
  }
  for (const auto& c : table.crossings) {
    out += fmt::format("# crossing {} = {} in [{}, {}]\n", to_string(table.parameter),
                       format_number(c.value), format_number(c.lower), format_number(c.upper));
  }
  return out;
}

nlohmann::json to_json(const ScenarioConfig& c) {
  using nlohmann::json;
  json pieces = json::array();
  const std::size_t patches = c.interfaces.size() + 1;
  for (std::size_t k = 0; k < c.pieces.size(); ++k) {
    const auto& p = c.pieces[k];
    json piece = {{"patches", {k / patches, k % patches}}, {"c", p.coefficient}};
    if (p.form == KernelPiece::Form::Constant) {
      piece["form"] = "constant";
    } else {
      piece["form"] = "exponential";
      piece["b"] = p.decay;
    }
    pieces.push_back(piece);
  }
  json growth = {{"variant", c.growth.variant}, {"r0", c.growth.r0}, {"b", c.growth.b}};
  if (c.growth.variant == "beverton_holt_with_influx") growth["c"] = c.growth.c;
  json out = {
      {"name", c.name},
      {"domain", {{"half_length", c.half_length}, {"interfaces", c.interfaces}}},
      {"kernel", {{"delta", c.delta}, {"lambda_bound", c.lambda_bound}, {"pieces", pieces}}},
      {"growth", growth},
      {"discretization",
       {{"panels_per_patch", c.panels_per_patch}, {"gauss_order", c.gauss_order}}},
      {"tolerances",
       {{"eigen_tol", c.tolerances.eigen_tol},
        {"eigen_max_iter", c.tolerances.eigen_max_iter},
        {"stationary_tol", c.tolerances.stationary_tol},
        {"extinction_threshold", c.tolerances.extinction_threshold},
        {"max_generations", c.tolerances.max_generations}}},
      {"output",
       {{"directory", c.output.directory},
        {"formats", c.output.formats},
        {"full_history", c.output.full_history}}},
      {"seed", c.seed},
      {"verify",
       {{"sample_count", c.verify.sample_count},
        {"uniqueness_seeds", c.verify.uniqueness_seeds},
        {"uniqueness_tol", c.verify.uniqueness_tol}}},
  };
  if (c.threshold) {
    const auto& s = *c.threshold;
    json th = {{"parameter", std::string(to_string(s.parameter))},
               {"lo", s.lo},
               {"hi", s.hi},
               {"samples", s.samples},
               {"validation_samples", s.validation_samples}};
    if (!s.pieces.empty()) {
      json pairs = json::array();
      for (const auto& [i, j] : s.pieces) pairs.push_back({i, j});
      th["pieces"] = pairs;
    }
    out["threshold"] = th;
  }
  return out;
}

nlohmann::json to_json(const EigenPair& p) {
  return {{"lambda0", p.lambda0},
          {"residual", p.residual},
          {"iterations", p.iterations},
          {"phi0_min", p.phi0_min},
          {"phi0_integral", p.phi0_integral}};
}

nlohmann::json to_json(const BoundReport& r) {
  return {{"lambda0", r.lambda0},
          {"lower_bound", r.lower_bound},
          {"tolerance", r.tolerance},
          {"satisfied", r.satisfied},
          {"phi0_min", r.phi0_min},
          {"phi0_min_bound", r.phi0_min_bound},
          {"phi0_positivity_satisfied", r.phi0_positivity_satisfied}};
}

nlohmann::json to_json(const MortalityReport& r) {
  nlohmann::json j = {{"max_kernel_mass", r.max_kernel_mass},
                      {"mass_at_most_one", r.mass_at_most_one},
                      {"r0_at_most_one", r.r0_at_most_one},
                      {"no_influx", r.no_influx},
                      {"hypotheses_hold", r.hypotheses_hold},
                      {"confirmed", r.confirmed}};
  j["lambda0"] = r.lambda0 ? nlohmann::json(*r.lambda0) : nlohmann::json(nullptr);
  return j;
}

namespace {

nlohmann::json trajectory_json(const Trajectory& t) {
  return {{"generations", t.generations},
          {"terminated_by", std::string(to_string(t.terminated_by))},
          {"monotonicity", std::string(to_string(t.monotonicity))},
          {"monotone_violation", t.monotone_violation},
          {"norm_consistency_violation", t.norm_consistency_violation},
          {"final_sup", t.sups.empty() ? 0.0 : t.sups.back()},
          {"final_sup_diff", t.sup_diffs.empty() ? 0.0 : t.sup_diffs.back()},
          {"final_l2_diff", t.l2_diffs.empty() ? 0.0 : t.l2_diffs.back()}};
}

}  // namespace

nlohmann::json to_json(const RegimeReport& r) {
  const auto& d = r.diagnostics;
  nlohmann::json j = {
      {"regime", std::string(to_string(r.regime))},
      {"lambda0", r.lambda0},
      {"converged", r.converged},
      {"critical_slowdown", r.critical_slowdown},
      {"generations_used", r.generations_used},
      {"stationary_min", r.stationary.minCoeff()},
      {"stationary_max", r.stationary.maxCoeff()},
      {"residual_sup", r.residual_sup},
      {"residual_l2", r.residual_l2},
      {"positivity_bound", r.positivity_bound},
      {"bracket",
       {{"epsilon", r.bracket.epsilon}, {"h", r.bracket.h}, {"N", r.bracket.N_value}}},
      {"diagnostics",
       {{"order_violation", d.order_violation},
        {"downward_monotone_violation", d.downward_monotone_violation},
        {"upward_monotone_violation", d.upward_monotone_violation},
        {"limit_gap", d.limit_gap},
        {"ordered", d.ordered()}}},
      {"downward", trajectory_json(r.downward)},
  };
  if (!r.upward.iterates.empty()) j["upward"] = trajectory_json(r.upward);
  return j;
}

nlohmann::json to_json(const PhaseTable& t) {
  nlohmann::json crossings = nlohmann::json::array();
  for (const auto& c : t.crossings) {
    crossings.push_back({{"lower", c.lower}, {"upper", c.upper}, {"value", c.value}});
  }
  return {{"parameter", std::string(to_string(t.parameter))},
          {"samples", t.rows.size()},
          {"crossings", crossings}};
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace

std::vector<std::string> emit_reports(const Artifacts& artifacts, const ScenarioConfig& config) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));

  const auto& formats = config.output.formats;
  const bool json = std::find(formats.begin(), formats.end(), "json") != formats.end();
  const bool csv = std::find(formats.begin(), formats.end(), "csv") != formats.end();
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& content) {
    const fs::path p = dir / name;
    write_file(p, content);
    written.push_back(p.string());
  };
  put("config.effective.yaml", to_yaml(config));
  if (json) put("summary.json", artifacts.summary.dump(2) + "\n");
  if (csv) {
    for (const auto& [name, content] : artifacts.tables) put(name, content);
  }
  return written;
}

}  // namespace patchide
