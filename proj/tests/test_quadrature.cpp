#include "patchide/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace patchide {
namespace {

TEST(GaussLegendre, TwoPointRuleIsPlusMinusInverseSqrtThree) {
  const auto rule = gauss_legendre(2);
  EXPECT_NEAR(rule.nodes(0), -1 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(rule.nodes(1), 1 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(rule.weights(0), 1.0, 1e-15);
  EXPECT_NEAR(rule.weights(1), 1.0, 1e-15);
}

TEST(GaussLegendre, OnePointRuleIsMidpoint) {
  const auto rule = gauss_legendre(1);
  EXPECT_EQ(rule.nodes(0), 0.0);
  EXPECT_NEAR(rule.weights(0), 2.0, 1e-15);
}

TEST(GaussLegendre, ThreePointRuleMatchesClosedForm) {
  const auto rule = gauss_legendre(3);
  EXPECT_NEAR(rule.nodes(0), -std::sqrt(0.6), 1e-15);
  EXPECT_EQ(rule.nodes(1), 0.0);
  EXPECT_NEAR(rule.weights(0), 5.0 / 9.0, 1e-15);
  EXPECT_NEAR(rule.weights(1), 8.0 / 9.0, 1e-15);
}

// An n-point rule integrates x^k exactly for k <= 2n - 1; the exact integral
// over [-1, 1] is 2 / (k + 1) for even k and 0 for odd k.
TEST(GaussLegendre, ExactOnPolynomialsUpToDegreeTwoNMinusOne) {
  for (int n = 1; n <= 16; ++n) {
    const auto rule = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double q = 0;
      for (int i = 0; i < n; ++i) q += rule.weights(i) * std::pow(rule.nodes(i), k);
      const double exact = k % 2 == 0 ? 2.0 / (k + 1) : 0.0;
      EXPECT_NEAR(q, exact, 1e-14) << "order " << n << " degree " << k;
    }
  }
}

TEST(GaussLegendre, NodesAscendingAndInterior) {
  for (int n = 1; n <= 16; ++n) {
    const auto rule = gauss_legendre(n);
    for (int i = 0; i < n; ++i) {
      EXPECT_GT(rule.nodes(i), -1.0);
      EXPECT_LT(rule.nodes(i), 1.0);
      EXPECT_GT(rule.weights(i), 0.0);
      if (i > 0) EXPECT_LT(rule.nodes(i - 1), rule.nodes(i));
    }
  }
}

TEST(GaussLegendre, LongDoubleRuleAgreesWithDouble) {
  const auto d = gauss_legendre<double>(7);
  const auto l = gauss_legendre<long double>(7);
  for (int i = 0; i < 7; ++i) {
    EXPECT_NEAR(d.nodes(i), static_cast<double>(l.nodes(i)), 1e-15);
    EXPECT_NEAR(d.weights(i), static_cast<double>(l.weights(i)), 1e-15);
  }
}

}  // namespace
}  // namespace patchide
