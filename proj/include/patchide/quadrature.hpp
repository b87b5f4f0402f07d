#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace patchide {

template <typename Scalar>
struct QuadratureRule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
};

namespace detail {

// (P_n(z), P_n'(z)) by the three-term recurrence.
template <typename Scalar>
std::pair<Scalar, Scalar> legendre_with_derivative(int n, Scalar z) {
  Scalar prev = 1;
  Scalar cur = z;
  for (int k = 2; k <= n; ++k) {
    const Scalar next = ((2 * k - 1) * z * cur - (k - 1) * prev) / k;
    prev = cur;
    cur = next;
  }
  return {cur, n * (z * cur - prev) / (z * z - 1)};
}

}  // namespace detail

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
///
/// Newton iteration on P_n from the initial guess cos(pi (i + 3/4) / (n + 1/2));
/// symmetric pairs are filled together and the middle node of an odd rule is 0.
template <typename Scalar = double>
QuadratureRule<Scalar> gauss_legendre(int order) {
  using std::abs;
  using std::cos;
  const int n = order;
  QuadratureRule<Scalar> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar z = cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    if (n % 2 == 1 && i == n / 2) z = 0;
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre_with_derivative(n, z);
      const Scalar dz = p / dp;
      z -= dz;
      if (abs(dz) <= 4 * eps) break;
    }
    const Scalar dp = detail::legendre_with_derivative(n, z).second;
    const Scalar w = 2 / ((1 - z * z) * dp * dp);
    rule.nodes(i) = -z;
    rule.nodes(n - 1 - i) = z;
    rule.weights(i) = w;
    rule.weights(n - 1 - i) = w;
  }
  return rule;
}

}  // namespace patchide
