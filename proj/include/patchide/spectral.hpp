#pragma once

#include "patchide/discretize.hpp"

#include <optional>

namespace patchide {

/// Principal eigenpair of r0 K. phi0 is strictly positive with sup-norm 1.
struct EigenPair {
  double lambda0 = 0;
  Vector phi0;
  double residual = 0;  // sup-norm of r0 K phi0 - lambda0 phi0
  int iterations = 0;
  double phi0_min = 0;
  double phi0_integral = 0;
};

struct EigenOptions {
  double tol = 1e-12;
  int max_iter = 100000;
  /// Stagnation is declared when the best residual has not halved over this
  /// many iterations (a numerically degenerate principal eigenvalue).
  int stagnation_window = 5000;
};

/// Power iteration on r0 K from the constant-1 vector with sup-norm
/// normalization. Stops once the residual is below tol and, after the first
/// step, the eigenvalue estimate moved by less than tol * lambda.
///
/// Throws NoConvergence when max_iter is exhausted or the residual plateaus,
/// and NonPositiveIterate if an iterate loses strict positivity.
EigenPair principal_eigen(const DiscreteOperator& op, double r0, const EigenOptions& options = {});

struct BoundReport {
  double lambda0 = 0;
  double lower_bound = 0;  // r0 * delta * |Omega|
  double tolerance = 0;
  bool satisfied = false;

  // inf phi0 >= (r0 delta / lambda0) * integral(phi0)
  double phi0_min = 0;
  double phi0_min_bound = 0;
  bool phi0_positivity_satisfied = false;
};

BoundReport check_spectral_lower_bound(const EigenPair& pair, const KernelSpec& spec, double r0,
                                       double tol_bound = 1e-9);

struct MortalityReport {
  double max_kernel_mass = 0;
  bool mass_at_most_one = false;
  bool r0_at_most_one = false;
  bool no_influx = false;  // F(0) = 0
  bool hypotheses_hold = false;
  std::optional<double> lambda0;  // set only when the hypotheses hold
  bool confirmed = false;
};

/// Tests the mortality criterion: if every node's kernel mass is <= 1 + tol
/// and r0 <= 1 with F(0) = 0, the principal eigenvalue must be <= 1 + tol.
MortalityReport check_mortality_regime(const DiscreteOperator& op, const GrowthFunction& g,
                                       const Grid& grid, const EigenOptions& options = {},
                                       double tol = 1e-12);

}  // namespace patchide
