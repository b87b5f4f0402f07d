#pragma once

#include "patchide/dynamics.hpp"
#include "patchide/spectral.hpp"

#include <string_view>
#include <utility>
#include <vector>

namespace patchide {

/// Everything needed to rebuild the linearized operator for one parameter value.
struct Scenario {
  KernelSpec kernel;
  GrowthFunction growth;
  int panels_per_patch = 4;
  int gauss_order = 4;
  EigenOptions eigen;
};

struct CriticalR0 {
  double r0_star = 0;       // 1 / rho(K)
  double rho = 0;           // principal eigenvalue at r0 = 1
  double check_lambda0 = 0; // principal eigenvalue recomputed at r0_star
};

/// r0* = 1 / rho(K) from a single eigensolve, using lambda0(r0) = r0 rho(K).
/// Throws InvariantViolation if the eigenvalue at r0* is not within tol of 1.
CriticalR0 critical_r0(const DiscreteOperator& op, double tol = 1e-9,
                       const EigenOptions& options = {});

enum class SweepParameter { R0, HalfLength, Coefficient, Decay };
std::string_view to_string(SweepParameter p);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::R0;
  double lo = 0;
  double hi = 0;
  int samples = 11;
  /// Kernel blocks (row patch, column patch) set to the swept value for
  /// Coefficient and Decay sweeps.
  std::vector<std::pair<std::size_t, std::size_t>> pieces;
  /// Lattice size for the endpoint hypothesis validation.
  int validation_samples = 8;

  bool operator==(const SweepSpec&) const = default;
};

struct PhaseRow {
  double value = 0;
  double lambda0 = 0;
  Regime regime = Regime::Extinction;
};

struct Crossing {
  double lower = 0;  // adjacent samples bracketing lambda0 = 1
  double upper = 0;
  double value = 0;  // refined critical value
};

struct PhaseTable {
  SweepParameter parameter = SweepParameter::R0;
  std::vector<PhaseRow> rows;
  std::vector<Crossing> crossings;
};

/// Scenario with the swept parameter set to `value`. Half-length sweeps scale
/// the interfaces with the domain so patch proportions are kept.
Scenario with_parameter(const Scenario& base, const SweepSpec& sweep, double value);

/// Samples lambda0 and the regime over [lo, hi] and locates every crossing of
/// lambda0 = 1 (closed form for r0, bisection to (hi - lo) 1e-6 otherwise).
///
/// Throws ValidationError for a bad range or failed endpoint hypotheses,
/// InvariantViolation when lambda0 is not monotone in the parameter beyond
/// 1e-10, and NonMonotoneCrossing when more than one crossing is found.
PhaseTable sweep(const Scenario& base, const SweepSpec& sweep);

}  // namespace patchide
