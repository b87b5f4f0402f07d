#pragma once

#include "patchide/discretize.hpp"
#include "patchide/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace patchide {

enum class Termination { ToleranceMet, BelowThreshold, MaxGenerations };
enum class Monotonicity { Nondecreasing, Nonincreasing, None };

std::string_view to_string(Termination t);
std::string_view to_string(Monotonicity m);

/// Generations u_0, u_1, ... of u_{n+1} = T(u_n) with per-step norms.
struct Trajectory {
  /// Every iterate when full history was requested, otherwise the last two.
  std::vector<Vector> iterates;
  std::vector<double> sup_diffs;  // |u_{n+1} - u_n|_inf, n = 0, 1, ...
  std::vector<double> l2_diffs;   // quadrature-weighted 2-norm of the same
  std::vector<double> sups;       // |u_n|_inf, n = 0, 1, ...
  Termination terminated_by = Termination::MaxGenerations;
  int generations = 0;

  /// Direction fixed by comparing u_1 with u_0; the violation is the largest
  /// step against that direction over the remaining generations.
  Monotonicity monotonicity = Monotonicity::None;
  double monotone_violation = 0;
  /// max over steps of l2_diff - sqrt(|Omega|) sup_diff (nonpositive in exact arithmetic).
  double norm_consistency_violation = 0;

  const Vector& last() const { return iterates.back(); }
};

struct IterateOptions {
  bool full_history = false;
  bool stop_on_tolerance = true;
  /// Also stop once |u_n|_inf drops below this value.
  std::optional<double> stop_below;
};

/// Applies T until |u_{n+1} - u_n|_inf < tol (or another configured stop)
/// or max_gen generations. Throws PreconditionUnmet if u0 has a negative
/// entry or tol <= 0.
Trajectory iterate(const DiscreteOperator& op, const GrowthFunction& g, const Vector& u0, double tol,
                   int max_gen, const IterateOptions& options = {});

struct SuperSolution {
  double value = 0;  // N = 2 (|Omega| Lambda M)
  Vector profile;
};

/// Constant N = 2 |Omega| Lambda M. Throws InvariantViolation if T(N) <= N
/// fails, which means the kernel exceeds its declared Lambda.
SuperSolution super_solution_start(const DiscreteOperator& op, const GrowthFunction& g);

struct SubSolution {
  double epsilon = 0;
  double h = 0;
  Vector profile;    // epsilon * phi0
  double min_gap = 0;  // min of T(epsilon phi0) - epsilon phi0
};

/// Halving search from epsilon = 1 for T(eps phi0) >= (lambda0 / (1 + h)) eps phi0
/// with h = sqrt(min(r0, lambda0)) - 1.
///
/// Throws PreconditionUnmet unless lambda0 > 1, r0 > 1 and F(0) = 0, and
/// EpsilonSearchFailed after 60 halvings.
SubSolution sub_solution_start(const EigenPair& pair, const DiscreteOperator& op,
                               const GrowthFunction& g);

enum class Regime { Extinction, Persistence, PersistenceWithInflux };
std::string_view to_string(Regime r);

/// F(0) > 0 gives PersistenceWithInflux; otherwise lambda0 <= 1 is Extinction.
Regime classify_regime(double lambda0, const GrowthFunction& g);

struct Bracket {
  Vector lower_start;
  Vector upper_start;
  double epsilon = 0;
  double h = 0;
  double N_value = 0;
};

/// Bracket health over a lock-step run of the lower and upper sequences.
/// All violations are nonpositive in exact arithmetic.
struct BracketDiagnostics {
  double order_violation = 0;           // max over n of (lower_n - upper_n)
  double downward_monotone_violation = 0;  // max over n of (upper_{n+1} - upper_n)
  double upward_monotone_violation = 0;    // max over n of (lower_n - lower_{n+1})
  double limit_gap = 0;                 // |upper limit - lower limit|_inf

  static constexpr double violation_tolerance = 1e-13;
  bool ordered() const {
    return order_violation <= violation_tolerance &&
           downward_monotone_violation <= violation_tolerance &&
           upward_monotone_violation <= violation_tolerance;
  }
};

struct RegimeReport {
  Regime regime = Regime::Extinction;
  double lambda0 = 0;
  Vector stationary;
  int generations_used = 0;
  Bracket bracket;
  double residual_sup = 0;  // |T(w) - w|_inf
  double residual_l2 = 0;
  bool converged = false;
  bool critical_slowdown = false;
  Trajectory downward;
  Trajectory upward;       // empty for Extinction
  BracketDiagnostics diagnostics;
  double positivity_bound = 0;  // delta * integral of F(w)
};

struct SolveOptions {
  double tol = 1e-10;
  int max_gen = 100000;
  double extinction_threshold = 1e-12;
  bool full_history = false;
};

/// Extinction: iterate down from N until the sup-norm is below the extinction
/// threshold. Persistence: iterate up from eps phi0 and down from N in lock
/// step. Influx: iterate up from 0 and down from N. The two limits must agree
/// to 10 tol (BracketMismatch otherwise); the stationary state is the
/// downward limit. Throws NoConvergence on max_gen, except inside the
/// critical window |lambda0 - 1| <= 1e-3 of the extinction branch, where the
/// report is returned unconverged with critical_slowdown set.
RegimeReport solve_stationary(const DiscreteOperator& op, const GrowthFunction& g,
                              const EigenPair& pair, const SolveOptions& options = {});

struct ComparisonReport {
  double max_violation = 0;     // max of v - u; expected <= slack
  double super_residual = 0;    // max of T(u) - u
  double sub_residual = 0;      // max of v - T(v)
  bool passed = false;
};

/// Checks u >= v for a super-solution u (u >= T(u), min u > 0) and a
/// sub-solution v (v <= T(v)). `slack` absorbs roundoff in both the
/// preconditions and the conclusion. Throws PreconditionUnmet when the inputs
/// are not a super/sub pair.
ComparisonReport comparison_check(const DiscreteOperator& op, const GrowthFunction& g,
                                  const Vector& u, const Vector& v, double slack = 0);

struct UniquenessOptions {
  int seeds = 5;
  double tol = 1e-8;             // pairwise agreement of limits
  double iteration_tol = 1e-11;  // stopping rule for each run
  int max_gen = 100000;
  std::uint64_t rng_seed = 20211014;
};

struct UniquenessReport {
  std::uint64_t rng_seed = 0;
  std::vector<PiecewiseProfile> starts;
  std::vector<Vector> limits;
  std::vector<int> generations;
  double max_pairwise_gap = 0;
};

/// Random nonnegative step profiles: breakpoints at the interfaces plus up to
/// three random points, step values in (0, upper].
std::vector<PiecewiseProfile> random_step_profiles(const PatchPartition& partition, int count,
                                                   double upper, std::uint64_t rng_seed);

/// Iterates from `seeds` random step profiles (values up to N) and requires
/// all limits to agree pairwise within tol. Throws NoConvergence for a seed
/// that does not settle and Disagreement when two limits differ by more
/// than tol.
UniquenessReport uniqueness_probe(const DiscreteOperator& op, const GrowthFunction& g,
                                  const UniquenessOptions& options = {});

/// Same, from caller-supplied starting profiles.
UniquenessReport uniqueness_probe(const DiscreteOperator& op, const GrowthFunction& g,
                                  const std::vector<PiecewiseProfile>& starts,
                                  const UniquenessOptions& options);

}  // namespace patchide
