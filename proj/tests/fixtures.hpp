#pragma once

#include "patchide/discretize.hpp"
#include "patchide/landscape.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <random>

namespace patchide::testing {

/// k = c on (-a, a), no interfaces.
inline KernelSpec constant_kernel(double a, double c, double delta, double lambda_bound) {
  return KernelSpec::uniform(PatchPartition(a), KernelPiece::constant(c), delta, lambda_bound);
}

/// The two-patch landscape on (-1, 1) cut at 0 with 0.6 within and
/// `cross` across patches.
inline KernelSpec two_patch_kernel(double delta = 0.19, double lambda_bound = 0.6,
                                   double cross = 0.2) {
  return KernelSpec(PatchPartition(1.0, {0.0}),
                    {KernelPiece::constant(0.6), KernelPiece::constant(cross),
                     KernelPiece::constant(cross), KernelPiece::constant(0.6)},
                    delta, lambda_bound);
}

/// Independent oracle for block-constant kernels: spectral radius of the
/// patch-reduced matrix [r0 c_ij |Omega_j|] by a dense eigensolve.
inline double patch_reduced_radius(const KernelSpec& spec, double r0) {
  const auto& part = spec.partition();
  const auto p = static_cast<Eigen::Index>(part.patch_count());
  Eigen::MatrixXd m(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      m(i, j) = r0 * spec.piece(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).coefficient *
                part.patch_length(static_cast<std::size_t>(j));
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// 2x2 characteristic polynomial root, the second independent route.
inline double two_by_two_radius(double a, double b, double c, double d) {
  const double tr = a + d;
  const double det = a * d - b * c;
  return 0.5 * (tr + std::sqrt(tr * tr - 4 * det));
}

/// Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  const bool lo_neg = f(lo) < 0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0) == lo_neg) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline Vector random_vector(Eigen::Index n, std::mt19937_64& rng, double lo = 0, double hi = 1) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

}  // namespace patchide::testing
