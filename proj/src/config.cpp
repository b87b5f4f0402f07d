#include "patchide/config.hpp"

#include "patchide/errors.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string_view>

namespace patchide {

PatchPartition ScenarioConfig::partition() const { return PatchPartition(half_length, interfaces); }

KernelSpec ScenarioConfig::kernel() const {
  return KernelSpec(partition(), pieces, delta, lambda_bound);
}

GrowthFunction ScenarioConfig::growth_function() const {
  if (growth.variant == "beverton_holt_with_influx") {
    return GrowthFunction::beverton_holt_with_influx(growth.c, growth.r0, growth.b);
  }
  return GrowthFunction::beverton_holt(growth.r0, growth.b);
}

EigenOptions ScenarioConfig::eigen_options() const {
  EigenOptions o;
  o.tol = tolerances.eigen_tol;
  o.max_iter = tolerances.eigen_max_iter;
  return o;
}

SolveOptions ScenarioConfig::solve_options() const {
  SolveOptions o;
  o.tol = tolerances.stationary_tol;
  o.max_gen = tolerances.max_generations;
  o.extinction_threshold = tolerances.extinction_threshold;
  o.full_history = output.full_history;
  return o;
}

Scenario ScenarioConfig::scenario() const {
  return Scenario{kernel(), growth_function(), panels_per_patch, gauss_order, eigen_options()};
}

namespace {

class Reader {
 public:
  std::vector<std::string> problems;

  void check_keys(const YAML::Node& node, const std::string& path,
                  std::initializer_list<std::string_view> allowed) {
    if (!node.IsMap()) {
      problems.push_back(fmt::format("{}: expected a mapping", path.empty() ? "<root>" : path));
      return;
    }
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        problems.push_back(fmt::format("{}: unknown key", join(path, key)));
      }
    }
  }

  template <typename T>
  std::optional<T> get(const YAML::Node& node, const std::string& path, const char* key,
                       bool required) {
    if (!node.IsMap()) return std::nullopt;
    const YAML::Node child = node[key];
    if (!child) {
      if (required) problems.push_back(fmt::format("{}: required", join(path, key)));
      return std::nullopt;
    }
    try {
      return child.as<T>();
    } catch (const YAML::Exception&) {
      problems.push_back(fmt::format("{}: {}", join(path, key), expected<T>()));
      return std::nullopt;
    }
  }

  template <typename T>
  void read(const YAML::Node& node, const std::string& path, const char* key, T& out,
            bool required = false) {
    if (auto v = get<T>(node, path, key, required)) out = *v;
  }

  static std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : fmt::format("{}.{}", path, key);
  }

 private:
  template <typename T>
  static const char* expected() {
    if constexpr (std::is_same_v<T, double>) return "expected a number";
    else if constexpr (std::is_same_v<T, bool>) return "expected true or false";
    else if constexpr (std::is_integral_v<T>) return "expected an integer";
    else if constexpr (std::is_same_v<T, std::string>) return "expected a string";
    else return "unexpected value";
  }
};

std::optional<KernelPiece> read_piece(Reader& r, const YAML::Node& node, const std::string& path,
                                      bool with_patches) {
  if (with_patches) {
    r.check_keys(node, path, {"patches", "form", "c", "b"});
  } else {
    r.check_keys(node, path, {"form", "c", "b"});
  }
  if (!node.IsMap()) return std::nullopt;
  KernelPiece piece;
  const auto form = r.get<std::string>(node, path, "form", true);
  const auto c = r.get<double>(node, path, "c", true);
  const auto b = r.get<double>(node, path, "b", false);
  if (!form || !c) return std::nullopt;
  if (*form == "constant") {
    piece = KernelPiece::constant(*c);
    if (b) r.problems.push_back(fmt::format("{}.b: only valid for exponential pieces", path));
  } else if (*form == "exponential") {
    if (!b) {
      r.problems.push_back(fmt::format("{}.b: required for exponential pieces", path));
      return std::nullopt;
    }
    piece = KernelPiece::exponential(*c, *b);
    if (!(*b >= 0)) r.problems.push_back(fmt::format("{}.b: must be >= 0", path));
  } else {
    r.problems.push_back(fmt::format("{}.form: expected constant or exponential", path));
    return std::nullopt;
  }
  if (!(*c > 0)) r.problems.push_back(fmt::format("{}.c: must be > 0", path));
  return piece;
}

std::optional<std::pair<std::size_t, std::size_t>> read_pair(Reader& r, const YAML::Node& node,
                                                             const std::string& path,
                                                             std::size_t patches) {
  if (!node || !node.IsSequence() || node.size() != 2) {
    r.problems.push_back(fmt::format("{}: expected [row_patch, column_patch]", path));
    return std::nullopt;
  }
  try {
    const auto i = node[0].as<long long>();
    const auto j = node[1].as<long long>();
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= patches ||
        static_cast<std::size_t>(j) >= patches) {
      r.problems.push_back(
          fmt::format("{}: patch pair ({}, {}) does not exist ({} patches)", path, i, j, patches));
      return std::nullopt;
    }
    return std::pair{static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
  } catch (const YAML::Exception&) {
    r.problems.push_back(fmt::format("{}: expected integer patch indices", path));
    return std::nullopt;
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(fmt::format("malformed config: {}", e.what()));
  }
  if (!root || root.IsNull()) throw ParseError("config is empty");

  Reader r;
  ScenarioConfig cfg;
  r.check_keys(root, "", {"name", "domain", "kernel", "growth", "discretization", "tolerances",
                          "output", "seed", "verify", "threshold"});
  if (!root.IsMap()) throw ValidationError(fmt::format("{}", fmt::join(r.problems, "\n")));
  r.read(root, "", "name", cfg.name);

  // domain
  const YAML::Node domain = root["domain"];
  bool domain_ok = false;
  if (!domain) {
    r.problems.push_back("domain: required");
  } else {
    r.check_keys(domain, "domain", {"half_length", "interfaces"});
    const auto a = r.get<double>(domain, "domain", "half_length", true);
    r.read(domain, "domain", "interfaces", cfg.interfaces);
    if (a) {
      cfg.half_length = *a;
      domain_ok = true;
      if (!(*a > 0) || !std::isfinite(*a)) {
        r.problems.push_back("domain.half_length: must be > 0");
        domain_ok = false;
      }
      double prev = -*a;
      for (std::size_t k = 0; k < cfg.interfaces.size(); ++k) {
        const double p = cfg.interfaces[k];
        if (!(p > -*a && p < *a)) {
          r.problems.push_back(fmt::format(
              "domain.interfaces[{}]: {} lies outside the domain (-{}, {})", k, p, *a, *a));
          domain_ok = false;
        } else if (!(p > prev)) {
          r.problems.push_back(
              fmt::format("domain.interfaces[{}]: {} is not strictly increasing", k, p));
          domain_ok = false;
        }
        prev = p;
      }
    }
  }
  const std::size_t patches = cfg.interfaces.size() + 1;

  // kernel
  const YAML::Node kernel = root["kernel"];
  if (!kernel) {
    r.problems.push_back("kernel: required");
  } else {
    r.check_keys(kernel, "kernel", {"delta", "lambda_bound", "default", "pieces"});
    const auto delta = r.get<double>(kernel, "kernel", "delta", true);
    const auto lambda = r.get<double>(kernel, "kernel", "lambda_bound", true);
    if (delta) {
      cfg.delta = *delta;
      if (!(*delta > 0)) r.problems.push_back("kernel.delta: must be > 0");
    }
    if (lambda) cfg.lambda_bound = *lambda;
    if (delta && lambda && !(*delta < *lambda)) {
      r.problems.push_back(
          fmt::format("kernel.delta: {} must be below kernel.lambda_bound {}", *delta, *lambda));
    }
    std::vector<std::optional<KernelPiece>> table(patches * patches);
    if (const YAML::Node def = kernel["default"]) {
      if (auto piece = read_piece(r, def, "kernel.default", false)) {
        std::fill(table.begin(), table.end(), piece);
      }
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    if (const YAML::Node list = kernel["pieces"]) {
      if (!list.IsSequence()) {
        r.problems.push_back("kernel.pieces: expected a list");
      } else {
        for (std::size_t k = 0; k < list.size(); ++k) {
          const std::string path = fmt::format("kernel.pieces[{}]", k);
          const YAML::Node item = list[k];
          auto piece = read_piece(r, item, path, true);
          if (!item.IsMap()) continue;
          auto pair = read_pair(r, item["patches"], path + ".patches", patches);
          if (!pair) continue;
          if (!seen.insert(*pair).second) {
            r.problems.push_back(fmt::format("{}: patch pair ({}, {}) defined twice", path,
                                             pair->first, pair->second));
          }
          if (piece) table[pair->first * patches + pair->second] = piece;
        }
      }
    }
    cfg.pieces.clear();
    bool complete = true;
    for (std::size_t k = 0; k < table.size(); ++k) {
      if (!table[k]) {
        complete = false;
        if (domain_ok) {
          r.problems.push_back(fmt::format("kernel.pieces: no formula for patch pair ({}, {})",
                                           k / patches, k % patches));
        }
      }
    }
    if (complete) {
      for (const auto& p : table) cfg.pieces.push_back(*p);
    }
  }

  // growth
  const YAML::Node growth = root["growth"];
  if (!growth) {
    r.problems.push_back("growth: required");
  } else {
    r.check_keys(growth, "growth", {"variant", "r0", "b", "c"});
    r.read(growth, "growth", "variant", cfg.growth.variant, true);
    r.read(growth, "growth", "r0", cfg.growth.r0, true);
    r.read(growth, "growth", "b", cfg.growth.b, true);
    const auto c = r.get<double>(growth, "growth", "c", false);
    if (cfg.growth.variant == "beverton_holt") {
      if (c) r.problems.push_back("growth.c: only valid for beverton_holt_with_influx");
    } else if (cfg.growth.variant == "beverton_holt_with_influx") {
      if (!c) {
        r.problems.push_back("growth.c: required for beverton_holt_with_influx");
      } else {
        cfg.growth.c = *c;
        if (!(*c > 0)) r.problems.push_back("growth.c: must be > 0");
      }
    } else {
      r.problems.push_back("growth.variant: expected beverton_holt or beverton_holt_with_influx");
    }
    if (!(cfg.growth.r0 > 0)) r.problems.push_back("growth.r0: must be > 0");
    if (!(cfg.growth.b > 0)) r.problems.push_back("growth.b: must be > 0");
  }

  if (const YAML::Node d = root["discretization"]) {
    r.check_keys(d, "discretization", {"panels_per_patch", "gauss_order"});
    r.read(d, "discretization", "panels_per_patch", cfg.panels_per_patch);
    r.read(d, "discretization", "gauss_order", cfg.gauss_order);
  }
  if (cfg.panels_per_patch < 1) r.problems.push_back("discretization.panels_per_patch: must be >= 1");
  if (cfg.gauss_order < 1 || cfg.gauss_order > 16) {
    r.problems.push_back("discretization.gauss_order: must be in 1..16");
  }

  if (const YAML::Node t = root["tolerances"]) {
    const std::string p = "tolerances";
    r.check_keys(t, p, {"eigen_tol", "eigen_max_iter", "stationary_tol", "extinction_threshold",
                        "max_generations"});
    r.read(t, p, "eigen_tol", cfg.tolerances.eigen_tol);
    r.read(t, p, "eigen_max_iter", cfg.tolerances.eigen_max_iter);
    r.read(t, p, "stationary_tol", cfg.tolerances.stationary_tol);
    r.read(t, p, "extinction_threshold", cfg.tolerances.extinction_threshold);
    r.read(t, p, "max_generations", cfg.tolerances.max_generations);
  }
  const auto& tol = cfg.tolerances;
  if (!(tol.eigen_tol > 0)) r.problems.push_back("tolerances.eigen_tol: must be > 0");
  if (tol.eigen_max_iter < 1) r.problems.push_back("tolerances.eigen_max_iter: must be >= 1");
  if (!(tol.stationary_tol > 0)) r.problems.push_back("tolerances.stationary_tol: must be > 0");
  if (!(tol.extinction_threshold > 0)) {
    r.problems.push_back("tolerances.extinction_threshold: must be > 0");
  }
  if (tol.max_generations < 1) r.problems.push_back("tolerances.max_generations: must be >= 1");

  if (const YAML::Node o = root["output"]) {
    r.check_keys(o, "output", {"directory", "formats", "full_history"});
    r.read(o, "output", "directory", cfg.output.directory);
    r.read(o, "output", "formats", cfg.output.formats);
    r.read(o, "output", "full_history", cfg.output.full_history);
  }
  for (const auto& f : cfg.output.formats) {
    if (f != "json" && f != "csv") {
      r.problems.push_back(fmt::format("output.formats: unknown format '{}'", f));
    }
  }
  if (cfg.output.directory.empty()) r.problems.push_back("output.directory: must not be empty");

  r.read(root, "", "seed", cfg.seed);

  if (const YAML::Node v = root["verify"]) {
    r.check_keys(v, "verify", {"sample_count", "uniqueness_seeds", "uniqueness_tol"});
    r.read(v, "verify", "sample_count", cfg.verify.sample_count);
    r.read(v, "verify", "uniqueness_seeds", cfg.verify.uniqueness_seeds);
    r.read(v, "verify", "uniqueness_tol", cfg.verify.uniqueness_tol);
  }
  if (cfg.verify.sample_count < 2) r.problems.push_back("verify.sample_count: must be >= 2");
  if (cfg.verify.uniqueness_seeds < 2) r.problems.push_back("verify.uniqueness_seeds: must be >= 2");
  if (!(cfg.verify.uniqueness_tol > 0)) r.problems.push_back("verify.uniqueness_tol: must be > 0");

  if (const YAML::Node th = root["threshold"]) {
    const std::string p = "threshold";
    r.check_keys(th, p, {"parameter", "lo", "hi", "samples", "pieces", "validation_samples"});
    SweepSpec s;
    const auto param = r.get<std::string>(th, p, "parameter", true);
    r.read(th, p, "lo", s.lo, true);
    r.read(th, p, "hi", s.hi, true);
    r.read(th, p, "samples", s.samples);
    r.read(th, p, "validation_samples", s.validation_samples);
    if (param) {
      if (*param == "r0") s.parameter = SweepParameter::R0;
      else if (*param == "half_length") s.parameter = SweepParameter::HalfLength;
      else if (*param == "coefficient") s.parameter = SweepParameter::Coefficient;
      else if (*param == "decay") s.parameter = SweepParameter::Decay;
      else r.problems.push_back("threshold.parameter: expected r0, half_length, coefficient or decay");
    }
    if (const YAML::Node list = th["pieces"]) {
      if (!list.IsSequence()) {
        r.problems.push_back("threshold.pieces: expected a list of patch pairs");
      } else {
        for (std::size_t k = 0; k < list.size(); ++k) {
          if (auto pair = read_pair(r, list[k], fmt::format("threshold.pieces[{}]", k), patches)) {
            s.pieces.push_back(*pair);
          }
        }
      }
    }
    const bool needs_pieces =
        s.parameter == SweepParameter::Coefficient || s.parameter == SweepParameter::Decay;
    if (needs_pieces && s.pieces.empty()) {
      r.problems.push_back("threshold.pieces: required for coefficient and decay sweeps");
    }
    if (!needs_pieces && !s.pieces.empty()) {
      r.problems.push_back("threshold.pieces: only valid for coefficient and decay sweeps");
    }
    if (!(s.lo < s.hi)) r.problems.push_back("threshold.lo: must be below threshold.hi");
    if (s.samples < 2) r.problems.push_back("threshold.samples: must be >= 2");
    if (s.validation_samples < 2) r.problems.push_back("threshold.validation_samples: must be >= 2");
    cfg.threshold = s;
  }

  if (!r.problems.empty()) {
    throw ValidationError(fmt::format("invalid config:\n  {}", fmt::join(r.problems, "\n  ")));
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read config file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

std::string to_yaml(const ScenarioConfig& c) {
  std::string y;
  auto line = [&y](std::string_view s) {
    y += s;
    y += '\n';
  };
  line(fmt::format("name: {}", quoted(c.name)));
  line("domain:");
  line(fmt::format("  half_length: {}", num(c.half_length)));
  std::vector<std::string> ifs;
  for (double p : c.interfaces) ifs.push_back(num(p));
  line(fmt::format("  interfaces: [{}]", fmt::join(ifs, ", ")));
  line("kernel:");
  line(fmt::format("  delta: {}", num(c.delta)));
  line(fmt::format("  lambda_bound: {}", num(c.lambda_bound)));
  line("  pieces:");
  const std::size_t patches = c.interfaces.size() + 1;
  for (std::size_t k = 0; k < c.pieces.size(); ++k) {
    const auto& p = c.pieces[k];
    if (p.form == KernelPiece::Form::Constant) {
      line(fmt::format("    - {{patches: [{}, {}], form: constant, c: {}}}", k / patches,
                       k % patches, num(p.coefficient)));
    } else {
      line(fmt::format("    - {{patches: [{}, {}], form: exponential, c: {}, b: {}}}", k / patches,
                       k % patches, num(p.coefficient), num(p.decay)));
    }
  }
  line("growth:");
  line(fmt::format("  variant: {}", c.growth.variant));
  line(fmt::format("  r0: {}", num(c.growth.r0)));
  line(fmt::format("  b: {}", num(c.growth.b)));
  if (c.growth.variant == "beverton_holt_with_influx") line(fmt::format("  c: {}", num(c.growth.c)));
  line("discretization:");
  line(fmt::format("  panels_per_patch: {}", c.panels_per_patch));
  line(fmt::format("  gauss_order: {}", c.gauss_order));
  line("tolerances:");
  line(fmt::format("  eigen_tol: {}", num(c.tolerances.eigen_tol)));
  line(fmt::format("  eigen_max_iter: {}", c.tolerances.eigen_max_iter));
  line(fmt::format("  stationary_tol: {}", num(c.tolerances.stationary_tol)));
  line(fmt::format("  extinction_threshold: {}", num(c.tolerances.extinction_threshold)));
  line(fmt::format("  max_generations: {}", c.tolerances.max_generations));
  line("output:");
  line(fmt::format("  directory: {}", quoted(c.output.directory)));
  line(fmt::format("  formats: [{}]", fmt::join(c.output.formats, ", ")));
  line(fmt::format("  full_history: {}", c.output.full_history));
  line(fmt::format("seed: {}", c.seed));
  line("verify:");
  line(fmt::format("  sample_count: {}", c.verify.sample_count));
  line(fmt::format("  uniqueness_seeds: {}", c.verify.uniqueness_seeds));
  line(fmt::format("  uniqueness_tol: {}", num(c.verify.uniqueness_tol)));
  if (c.threshold) {
    const auto& s = *c.threshold;
    line("threshold:");
    line(fmt::format("  parameter: {}", to_string(s.parameter)));
    line(fmt::format("  lo: {}", num(s.lo)));
    line(fmt::format("  hi: {}", num(s.hi)));
    line(fmt::format("  samples: {}", s.samples));
    line(fmt::format("  validation_samples: {}", s.validation_samples));
    if (!s.pieces.empty()) {
      std::vector<std::string> pairs;
      for (const auto& [i, j] : s.pieces) pairs.push_back(fmt::format("[{}, {}]", i, j));
      line(fmt::format("  pieces: [{}]", fmt::join(pairs, ", ")));
    }
  }
  return y;
}

std::string config_hash(const ScenarioConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_yaml(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace patchide
