#include "patchide/landscape.hpp"

#include "patchide/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace patchide {

PatchPartition::PatchPartition(double half_length, std::vector<double> interfaces)
    : half_length_(half_length), interfaces_(std::move(interfaces)) {
  if (!(half_length_ > 0) || !std::isfinite(half_length_)) {
    throw InvalidModel(fmt::format("half_length must be positive, got {}", half_length_));
  }
  double prev = -half_length_;
  for (double p : interfaces_) {
    if (!(p > prev) || !(p < half_length_)) {
      throw InvalidModel(fmt::format(
          "interfaces must be strictly increasing inside (-{0}, {0}); offending value {1}",
          half_length_, p));
    }
    prev = p;
  }
}

double PatchPartition::patch_lower(std::size_t patch) const {
  return patch == 0 ? -half_length_ : interfaces_.at(patch - 1);
}

double PatchPartition::patch_upper(std::size_t patch) const {
  return patch == interfaces_.size() ? half_length_ : interfaces_.at(patch);
}

std::size_t PatchPartition::patch_of(double x) const {
  if (!(std::abs(x) < half_length_)) {
    throw PointOutsideDomain(fmt::format("point {} outside (-{}, {})", x, half_length_, half_length_));
  }
  const auto it = std::lower_bound(interfaces_.begin(), interfaces_.end(), x);
  if (it != interfaces_.end() && *it == x) {
    throw PointOnInterface(fmt::format("point {} lies on an interface", x));
  }
  return static_cast<std::size_t>(it - interfaces_.begin());
}

double KernelPiece::operator()(double x, double y) const {
  switch (form) {
    case Form::Constant:
      return coefficient;
    case Form::Exponential:
      return coefficient * std::exp(-decay * std::abs(x - y));
  }
  return coefficient;
}

KernelSpec::KernelSpec(PatchPartition partition, std::vector<KernelPiece> pieces, double delta,
                       double lambda_bound)
    : partition_(std::move(partition)),
      pieces_(std::move(pieces)),
      delta_(delta),
      lambda_bound_(lambda_bound) {
  const std::size_t p = partition_.patch_count();
  if (pieces_.size() != p * p) {
    throw InvalidModel(fmt::format("expected {} kernel pieces, got {}", p * p, pieces_.size()));
  }
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& piece = pieces_[k];
    if (!(piece.coefficient > 0)) {
      throw InvalidModel(fmt::format("kernel piece ({}, {}): coefficient must be positive",
                                     k / p, k % p));
    }
    if (!(piece.decay >= 0)) {
      throw InvalidModel(fmt::format("kernel piece ({}, {}): decay must be nonnegative", k / p,
                                     k % p));
    }
  }
  if (!(delta_ > 0) || !(lambda_bound_ > delta_)) {
    throw InvalidModel(
        fmt::format("kernel bounds need 0 < delta < Lambda, got {} and {}", delta_, lambda_bound_));
  }
}

KernelSpec KernelSpec::uniform(PatchPartition partition, KernelPiece piece, double delta,
                               double lambda_bound) {
  const std::size_t p = partition.patch_count();
  return KernelSpec(std::move(partition), std::vector<KernelPiece>(p * p, piece), delta,
                    lambda_bound);
}

double eval_kernel(const KernelSpec& spec, double x, double y) {
  const auto& part = spec.partition();
  return spec.piece(part.patch_of(x), part.patch_of(y))(x, y);
}

GrowthFunction::GrowthFunction(Variant v, double c, double r0, double b)
    : variant_(v), c_(c), r0_(r0), b_(b) {
  if (!(r0_ > 0) || !std::isfinite(r0_)) throw InvalidModel("growth r0 must be positive");
  if (!(b_ > 0) || !std::isfinite(b_)) throw InvalidModel("growth b must be positive");
  if (v == Variant::BevertonHoltWithInflux && !(c_ > 0)) {
    throw InvalidModel("influx c must be positive");
  }
}

GrowthFunction GrowthFunction::beverton_holt(double r0, double b) {
  return GrowthFunction(Variant::BevertonHolt, 0, r0, b);
}

GrowthFunction GrowthFunction::beverton_holt_with_influx(double c, double r0, double b) {
  return GrowthFunction(Variant::BevertonHoltWithInflux, c, r0, b);
}

double PiecewiseProfile::operator()(double x) const {
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  return values.at(static_cast<std::size_t>(it - breakpoints.begin()));
}

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const AssumptionCheck& c) { return c.passed || c.advisory; });
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

// Midpoint lattice strictly inside a patch; never touches an interface.
std::vector<double> patch_samples(const PatchPartition& part, std::size_t patch, int count) {
  std::vector<double> xs(static_cast<std::size_t>(count));
  const double lo = part.patch_lower(patch);
  const double len = part.patch_length(patch);
  for (int k = 0; k < count; ++k) xs[static_cast<std::size_t>(k)] = lo + (k + 0.5) * len / count;
  return xs;
}

}  // namespace

AssumptionReport validate_assumptions(const KernelSpec& spec, const GrowthFunction& g,
                                      int sample_count) {
  if (sample_count < 2) {
    throw InvalidSampleCount(fmt::format("sample_count must be >= 2, got {}", sample_count));
  }
  AssumptionReport report;
  const auto& part = spec.partition();

  AssumptionCheck lower{"kernel_lower_bound", true, false, {}};
  AssumptionCheck upper{"kernel_upper_bound", true, false, {}};
  for (std::size_t i = 0; i < part.patch_count() && (lower.passed || upper.passed); ++i) {
    const auto xs = patch_samples(part, i, sample_count);
    for (std::size_t j = 0; j < part.patch_count(); ++j) {
      const auto ys = patch_samples(part, j, sample_count);
      for (double x : xs) {
        for (double y : ys) {
          const double k = eval_kernel(spec, x, y);
          if (lower.passed && !(k > spec.delta())) {
            lower.passed = false;
            lower.witness = fmt::format("block ({}, {}) at x={}, y={}: k={} <= delta={}", i, j, x,
                                        y, k, spec.delta());
          }
          if (upper.passed && !(k <= spec.lambda_bound())) {
            upper.passed = false;
            upper.witness = fmt::format("block ({}, {}) at x={}, y={}: k={} > Lambda={}", i, j, x,
                                        y, k, spec.lambda_bound());
          }
        }
      }
    }
  }
  report.checks.push_back(lower);
  report.checks.push_back(upper);

  // Geometric ladder from 1e-8 M to 10 M, ascending.
  const double m = g.bound();
  constexpr int ladder_size = 200;
  std::vector<double> ladder(ladder_size);
  for (int k = 0; k < ladder_size; ++k) {
    ladder[static_cast<std::size_t>(k)] = 10 * m * std::pow(1e-9, 1.0 - double(k) / (ladder_size - 1));
  }

  AssumptionCheck bounded{"growth_bounded", true, false, {}};
  for (double u : {-10 * m, -1.0, -1e-9, 0.0}) {
    const double f = g(u);
    if (!(f >= 0 && f <= m)) {
      bounded.passed = false;
      bounded.witness = fmt::format("F({}) = {} outside [0, {}]", u, f, m);
    }
    if (u < 0 && f != 0) {
      bounded.passed = false;
      bounded.witness = fmt::format("F({}) = {} but F must vanish on negatives", u, f);
    }
  }
  for (double u : ladder) {
    const double f = g(u);
    if (bounded.passed && !(f >= 0 && f <= m)) {
      bounded.passed = false;
      bounded.witness = fmt::format("F({}) = {} outside [0, {}]", u, f, m);
    }
  }
  report.checks.push_back(bounded);

  AssumptionCheck increasing{"growth_strictly_increasing", true, false, {}};
  AssumptionCheck ratio{"growth_ratio_decreasing", true, false, {}};
  double prev_u = 0;
  double prev_f = g(0.0);
  double prev_ratio = 0;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const double u = ladder[k];
    const double f = g(u);
    if (increasing.passed && !(f > prev_f)) {
      increasing.passed = false;
      increasing.witness = fmt::format("F({}) = {} not above F({}) = {}", u, f, prev_u, prev_f);
    }
    const double r = f / u;
    if (k > 0 && ratio.passed && !(r < prev_ratio)) {
      ratio.passed = false;
      ratio.witness =
          fmt::format("F(u)/u = {} at u={} not below {} at u={}", r, u, prev_ratio, prev_u);
    }
    prev_u = u;
    prev_f = f;
    prev_ratio = r;
  }
  report.checks.push_back(increasing);
  report.checks.push_back(ratio);

  AssumptionCheck slope{"r0_greater_than_one", true, false, {}};
  slope.advisory = true;
  if (!(g.r0() > 1)) {
    slope.passed = false;
    slope.witness = fmt::format(
        "r0 = {} <= 1; admissible only for the mortality regime (kernel mass <= 1) where "
        "extinction follows",
        g.r0());
  }
  report.checks.push_back(slope);

  AssumptionCheck ordered{"delta_below_lambda", true, false, {}};
  if (!(spec.delta() < spec.lambda_bound())) {
    ordered.passed = false;
    ordered.witness = fmt::format("delta = {} >= Lambda = {}", spec.delta(), spec.lambda_bound());
  }
  report.checks.push_back(ordered);
  return report;
}

}  // namespace patchide
