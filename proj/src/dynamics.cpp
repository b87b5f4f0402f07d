#include "patchide/dynamics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace patchide {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::ToleranceMet: return "ToleranceMet";
    case Termination::BelowThreshold: return "BelowThreshold";
    case Termination::MaxGenerations: return "MaxGenerations";
  }
  return "?";
}

std::string_view to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::Nondecreasing: return "nondecreasing";
    case Monotonicity::Nonincreasing: return "nonincreasing";
    case Monotonicity::None: return "none";
  }
  return "?";
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Extinction: return "Extinction";
    case Regime::Persistence: return "Persistence";
    case Regime::PersistenceWithInflux: return "PersistenceWithInflux";
  }
  return "?";
}

namespace {

// Accumulates a Trajectory one generation at a time.
class Recorder {
 public:
  Recorder(const Grid& grid, const Vector& u0, bool full_history,
           std::optional<Monotonicity> expected = std::nullopt)
      : grid_(grid), full_history_(full_history), expected_(expected),
        sqrt_measure_(std::sqrt(grid.weights.sum())) {
    traj_.iterates.push_back(u0);
    traj_.sups.push_back(u0.lpNorm<Eigen::Infinity>());
    if (expected_) traj_.monotonicity = *expected_;
  }

  const Vector& current() const { return traj_.iterates.back(); }
  double last_sup_diff() const {
    return traj_.sup_diffs.empty() ? std::numeric_limits<double>::infinity()
                                   : traj_.sup_diffs.back();
  }
  double last_sup() const { return traj_.sups.back(); }
  int generations() const { return traj_.generations; }

  void push(Vector next) {
    const Vector& prev = current();
    const Vector diff = next - prev;
    const double sup = diff.lpNorm<Eigen::Infinity>();
    const double l2 = weighted_l2_norm(grid_, diff);

    if (traj_.generations == 0 && !expected_) {
      if (diff.minCoeff() >= 0) {
        traj_.monotonicity = Monotonicity::Nondecreasing;
      } else if (diff.maxCoeff() <= 0) {
        traj_.monotonicity = Monotonicity::Nonincreasing;
      }
    }
    if (traj_.monotonicity == Monotonicity::Nondecreasing) {
      traj_.monotone_violation = std::max(traj_.monotone_violation, -diff.minCoeff());
    } else if (traj_.monotonicity == Monotonicity::Nonincreasing) {
      traj_.monotone_violation = std::max(traj_.monotone_violation, diff.maxCoeff());
    }
    traj_.norm_consistency_violation =
        std::max(traj_.norm_consistency_violation, l2 - sqrt_measure_ * sup);

    traj_.sup_diffs.push_back(sup);
    traj_.l2_diffs.push_back(l2);
    traj_.sups.push_back(next.lpNorm<Eigen::Infinity>());
    if (!full_history_ && traj_.iterates.size() == 2) {
      traj_.iterates.erase(traj_.iterates.begin());
    }
    traj_.iterates.push_back(std::move(next));
    ++traj_.generations;
  }

  Trajectory finish(Termination t) {
    traj_.terminated_by = t;
    return std::move(traj_);
  }

 private:
  const Grid& grid_;
  bool full_history_;
  std::optional<Monotonicity> expected_;
  double sqrt_measure_;
  Trajectory traj_;
};

double max_of(const Vector& v) { return v.size() == 0 ? 0.0 : v.maxCoeff(); }

}  // namespace

Trajectory iterate(const DiscreteOperator& op, const GrowthFunction& g, const Vector& u0, double tol,
                   int max_gen, const IterateOptions& options) {
  if (!(tol > 0)) throw PreconditionUnmet("iterate: tol must be positive");
  if (u0.size() != op.size()) throw DimensionMismatch("iterate: initial profile length mismatch");
  if (u0.size() > 0 && u0.minCoeff() < 0) {
    throw PreconditionUnmet("iterate: initial profile must be nonnegative");
  }
  Recorder rec(op.grid(), u0, options.full_history);
  if (options.stop_below && rec.last_sup() < *options.stop_below) {
    return rec.finish(Termination::BelowThreshold);
  }
  for (int n = 0; n < max_gen; ++n) {
    rec.push(apply_T(op, g, rec.current()));
    if (options.stop_below && rec.last_sup() < *options.stop_below) {
      return rec.finish(Termination::BelowThreshold);
    }
    if (options.stop_on_tolerance && rec.last_sup_diff() < tol) {
      return rec.finish(Termination::ToleranceMet);
    }
  }
  return rec.finish(Termination::MaxGenerations);
}

SuperSolution super_solution_start(const DiscreteOperator& op, const GrowthFunction& g) {
  const double measure = op.kernel().partition().measure();
  SuperSolution s;
  s.value = 2 * (measure * op.kernel().lambda_bound() * g.bound());
  s.profile = Vector::Constant(op.size(), s.value);
  const Vector image = apply_T(op, g, s.profile);
  if (max_of(image - s.profile) > 0) {
    throw InvariantViolation(fmt::format(
        "T(N) exceeds N = {} (max T(N) = {}); the kernel exceeds its declared Lambda", s.value,
        image.maxCoeff()));
  }
  return s;
}

SubSolution sub_solution_start(const EigenPair& pair, const DiscreteOperator& op,
                               const GrowthFunction& g) {
  const double lambda0 = pair.lambda0;
  const double r0 = g.r0();
  if (!(lambda0 > 1) || !(r0 > 1) || g.at_zero() != 0) {
    throw PreconditionUnmet(fmt::format(
        "sub-solution needs lambda0 > 1, r0 > 1 and F(0) = 0 (lambda0 = {}, r0 = {}, F(0) = {})",
        lambda0, r0, g.at_zero()));
  }
  SubSolution sub;
  sub.h = std::sqrt(std::min(r0, lambda0)) - 1;
  const double target = lambda0 / (1 + sub.h);
  double eps = 1;
  for (int halvings = 0; halvings <= 60; ++halvings, eps *= 0.5) {
    const Vector v = eps * pair.phi0;
    const Vector image = apply_T(op, g, v);
    if ((image - target * v).minCoeff() >= 0) {
      const double gap = (image - v).minCoeff();
      if (gap > 0) {
        sub.epsilon = eps;
        sub.profile = v;
        sub.min_gap = gap;
        return sub;
      }
    }
  }
  throw EpsilonSearchFailed(fmt::format(
      "no epsilon in [2^-60, 1] makes eps*phi0 a strict sub-solution (lambda0 = {}); the "
      "scenario is effectively at or below threshold",
      lambda0));
}

Regime classify_regime(double lambda0, const GrowthFunction& g) {
  if (g.at_zero() > 0) return Regime::PersistenceWithInflux;
  if (lambda0 <= 1) return Regime::Extinction;
  return Regime::Persistence;
}

RegimeReport solve_stationary(const DiscreteOperator& op, const GrowthFunction& g,
                              const EigenPair& pair, const SolveOptions& options) {
  if (!(options.tol > 0) || !(options.extinction_threshold > 0) || options.max_gen < 1) {
    throw PreconditionUnmet("solve_stationary: tolerances and max_gen must be positive");
  }
  const Grid& grid = op.grid();
  const Eigen::Index n = op.size();
  RegimeReport report;
  report.lambda0 = pair.lambda0;
  report.regime = classify_regime(pair.lambda0, g);
  report.critical_slowdown = g.at_zero() == 0 && std::abs(pair.lambda0 - 1) <= 1e-3;

  const auto super = super_solution_start(op, g);
  report.bracket.upper_start = super.profile;
  report.bracket.N_value = super.value;

  if (report.regime == Regime::Extinction) {
    report.bracket.lower_start = Vector::Zero(n);
    IterateOptions it;
    it.full_history = options.full_history;
    it.stop_on_tolerance = false;
    it.stop_below = options.extinction_threshold;
    report.downward = iterate(op, g, super.profile, options.tol, options.max_gen, it);
    report.converged = report.downward.terminated_by == Termination::BelowThreshold;
    if (!report.converged && !report.critical_slowdown) {
      throw NoConvergence(fmt::format(
          "extinction run did not drop below {} within {} generations (sup {})",
          options.extinction_threshold, options.max_gen, report.downward.sups.back()));
    }
    auto& d = report.diagnostics;
    d.downward_monotone_violation = report.downward.monotonicity == Monotonicity::Nonincreasing
                                        ? report.downward.monotone_violation
                                        : std::numeric_limits<double>::infinity();
    d.upward_monotone_violation = 0;
    d.order_violation = 0;
    for (const auto& u : report.downward.iterates) d.order_violation = std::max(d.order_violation, -u.minCoeff());
    d.limit_gap = report.downward.sups.back();
    report.stationary = Vector::Zero(n);
    const Vector residual = apply_T(op, g, report.stationary) - report.stationary;
    report.residual_sup = residual.lpNorm<Eigen::Infinity>();
    report.residual_l2 = weighted_l2_norm(grid, residual);
    report.generations_used = report.downward.generations;
    return report;
  }

  if (report.regime == Regime::Persistence) {
    const auto sub = sub_solution_start(pair, op, g);
    report.bracket.lower_start = sub.profile;
    report.bracket.epsilon = sub.epsilon;
    report.bracket.h = sub.h;
  } else {
    report.bracket.lower_start = Vector::Zero(n);
  }

  Recorder down(grid, report.bracket.upper_start, options.full_history, Monotonicity::Nonincreasing);
  Recorder up(grid, report.bracket.lower_start, options.full_history, Monotonicity::Nondecreasing);
  auto& d = report.diagnostics;
  d.order_violation = max_of(up.current() - down.current());
  bool converged = false;
  for (int gen = 0; gen < options.max_gen; ++gen) {
    down.push(apply_T(op, g, down.current()));
    up.push(apply_T(op, g, up.current()));
    d.order_violation = std::max(d.order_violation, max_of(up.current() - down.current()));
    if (down.last_sup_diff() < options.tol && up.last_sup_diff() < options.tol) {
      converged = true;
      break;
    }
  }
  report.downward = down.finish(converged ? Termination::ToleranceMet : Termination::MaxGenerations);
  report.upward = up.finish(converged ? Termination::ToleranceMet : Termination::MaxGenerations);
  d.downward_monotone_violation = report.downward.monotone_violation;
  d.upward_monotone_violation = report.upward.monotone_violation;
  report.generations_used = report.downward.generations;
  if (!converged) {
    throw NoConvergence(fmt::format(
        "bracketing sequences did not settle within {} generations (last steps {} / {})",
        options.max_gen, report.downward.sup_diffs.back(), report.upward.sup_diffs.back()));
  }
  d.limit_gap = (report.downward.last() - report.upward.last()).lpNorm<Eigen::Infinity>();
  if (d.limit_gap > 10 * options.tol) {
    throw BracketMismatch(fmt::format(
        "upward and downward limits differ by {} (> 10 * tol = {}); resolution too coarse or a "
        "hypothesis is violated",
        d.limit_gap, 10 * options.tol));
  }
  report.converged = true;
  report.stationary = report.downward.last();
  const Vector image = apply_T(op, g, report.stationary);
  const Vector residual = image - report.stationary;
  report.residual_sup = residual.lpNorm<Eigen::Infinity>();
  report.residual_l2 = weighted_l2_norm(grid, residual);

  Vector fw(n);
  for (Eigen::Index i = 0; i < n; ++i) fw(i) = g(report.stationary(i));
  report.positivity_bound = op.kernel().delta() * integrate(grid, fw);
  if (!(report.stationary.minCoeff() > 0)) {
    throw InvariantViolation("persistent stationary state is not strictly positive");
  }
  return report;
}

ComparisonReport comparison_check(const DiscreteOperator& op, const GrowthFunction& g,
                                  const Vector& u, const Vector& v, double slack) {
  if (u.size() != op.size() || v.size() != op.size()) {
    throw DimensionMismatch("comparison_check: profile length mismatch");
  }
  ComparisonReport report;
  report.super_residual = max_of(apply_T(op, g, u) - u);
  report.sub_residual = max_of(v - apply_T(op, g, v));
  if (!(u.minCoeff() > 0)) {
    throw PreconditionUnmet("comparison_check: super-solution must be strictly positive");
  }
  if (report.super_residual > slack) {
    throw PreconditionUnmet(fmt::format(
        "comparison_check: u is not a super-solution (T(u) - u reaches {})", report.super_residual));
  }
  if (report.sub_residual > slack) {
    throw PreconditionUnmet(fmt::format(
        "comparison_check: v is not a sub-solution (v - T(v) reaches {})", report.sub_residual));
  }
  report.max_violation = max_of(v - u);
  report.passed = report.max_violation <= slack;
  return report;
}

namespace {

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<PiecewiseProfile> random_step_profiles(const PatchPartition& partition, int count,
                                                   double upper, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  const double a = partition.half_length();
  std::vector<PiecewiseProfile> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int s = 0; s < count; ++s) {
    PiecewiseProfile p;
    p.breakpoints = partition.interfaces();
    const auto extra = static_cast<int>(rng() % 4);
    for (int k = 0; k < extra; ++k) {
      double x = -a;
      while (!(x > -a && x < a)) x = -a + 2 * a * unit(rng);
      p.breakpoints.push_back(x);
    }
    std::sort(p.breakpoints.begin(), p.breakpoints.end());
    p.breakpoints.erase(std::unique(p.breakpoints.begin(), p.breakpoints.end()), p.breakpoints.end());
    p.values.resize(p.breakpoints.size() + 1);
    for (double& val : p.values) val = upper * (1 - unit(rng));
    out.push_back(std::move(p));
  }
  return out;
}

UniquenessReport uniqueness_probe(const DiscreteOperator& op, const GrowthFunction& g,
                                  const UniquenessOptions& options) {
  if (options.seeds < 2) throw PreconditionUnmet("uniqueness_probe needs at least two seeds");
  const double upper = super_solution_start(op, g).value;
  auto starts =
      random_step_profiles(op.kernel().partition(), options.seeds, upper, options.rng_seed);
  return uniqueness_probe(op, g, starts, options);
}

UniquenessReport uniqueness_probe(const DiscreteOperator& op, const GrowthFunction& g,
                                  const std::vector<PiecewiseProfile>& starts,
                                  const UniquenessOptions& options) {
  UniquenessReport report;
  report.rng_seed = options.rng_seed;
  report.starts = starts;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const Vector u0 = starts[s].sample(op.grid().nodes);
    const auto traj = iterate(op, g, u0, options.iteration_tol, options.max_gen);
    if (traj.terminated_by != Termination::ToleranceMet) {
      throw NoConvergence(fmt::format("uniqueness seed {} did not settle within {} generations", s,
                                      options.max_gen));
    }
    report.limits.push_back(traj.last());
    report.generations.push_back(traj.generations);
  }
  for (std::size_t i = 0; i < report.limits.size(); ++i) {
    for (std::size_t j = i + 1; j < report.limits.size(); ++j) {
      report.max_pairwise_gap = std::max(
          report.max_pairwise_gap, (report.limits[i] - report.limits[j]).lpNorm<Eigen::Infinity>());
    }
  }
  if (report.max_pairwise_gap > options.tol) {
    throw Disagreement(fmt::format("stationary limits from different seeds differ by {} (> {})",
                                   report.max_pairwise_gap, options.tol));
  }
  return report;
}

}  // namespace patchide
