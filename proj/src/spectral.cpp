#include "patchide/spectral.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace patchide {

EigenPair principal_eigen(const DiscreteOperator& op, double r0, const EigenOptions& options) {
  if (!(options.tol > 0) || options.max_iter < 1) {
    throw PreconditionUnmet("principal_eigen needs tol > 0 and max_iter >= 1");
  }
  const Eigen::Index n = op.size();
  Vector phi = Vector::Ones(n);
  double prev_lambda = std::numeric_limits<double>::quiet_NaN();
  double best_residual = std::numeric_limits<double>::infinity();
  int best_at = 0;
  double lambda = 0;
  double residual = 0;

  for (int it = 1; it <= options.max_iter; ++it) {
    const Vector y = apply_T0(op, r0, phi);
    const double min_y = y.minCoeff();
    if (!(min_y > 0)) {
      throw NonPositiveIterate(fmt::format(
          "power iterate lost positivity at step {} (min {}); check the kernel lower bound", it,
          min_y));
    }
    lambda = y.maxCoeff();
    residual = (y - lambda * phi).lpNorm<Eigen::Infinity>();
    const bool drift_ok = it == 1 || std::abs(lambda - prev_lambda) < options.tol * lambda;
    if (residual < options.tol && drift_ok) {
      EigenPair pair;
      pair.lambda0 = lambda;
      pair.phi0 = phi;
      pair.residual = residual;
      pair.iterations = it;
      pair.phi0_min = phi.minCoeff();
      pair.phi0_integral = integrate(op.grid(), phi);
      return pair;
    }
    if (residual < 0.5 * best_residual) {
      best_residual = residual;
      best_at = it;
    } else if (it - best_at > options.stagnation_window) {
      throw NoConvergence(fmt::format(
          "power iteration stagnated at residual {} after {} steps (lambda estimate {}); the "
          "principal eigenvalue looks numerically degenerate or tol is below roundoff",
          residual, it, lambda));
    }
    prev_lambda = lambda;
    phi = y / lambda;
  }
  throw NoConvergence(fmt::format(
      "power iteration did not converge in {} steps (lambda estimate {}, residual {})",
      options.max_iter, lambda, residual));
}

BoundReport check_spectral_lower_bound(const EigenPair& pair, const KernelSpec& spec, double r0,
                                       double tol_bound) {
  BoundReport report;
  report.lambda0 = pair.lambda0;
  report.lower_bound = r0 * spec.delta() * spec.partition().measure();
  report.tolerance = tol_bound;
  report.satisfied = pair.lambda0 >= report.lower_bound - tol_bound;
  report.phi0_min = pair.phi0_min;
  report.phi0_min_bound = r0 * spec.delta() / pair.lambda0 * pair.phi0_integral;
  report.phi0_positivity_satisfied =
      pair.phi0_min > 0 && pair.phi0_min >= report.phi0_min_bound - tol_bound;
  return report;
}

MortalityReport check_mortality_regime(const DiscreteOperator& op, const GrowthFunction& g,
                                       const Grid& grid, const EigenOptions& options, double tol) {
  MortalityReport report;
  double max_mass = 0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    max_mass = std::max(max_mass, kernel_mass(op.kernel(), grid.nodes(i), grid));
  }
  report.max_kernel_mass = max_mass;
  report.mass_at_most_one = max_mass <= 1 + tol;
  report.r0_at_most_one = g.r0() <= 1;
  report.no_influx = g.at_zero() == 0;
  report.hypotheses_hold = report.mass_at_most_one && report.r0_at_most_one && report.no_influx;
  if (report.hypotheses_hold) {
    const auto pair = principal_eigen(op, g.r0(), options);
    report.lambda0 = pair.lambda0;
    report.confirmed = pair.lambda0 <= 1 + tol;
  }
  return report;
}

}  // namespace patchide
