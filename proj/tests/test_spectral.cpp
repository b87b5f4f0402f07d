#include "patchide/errors.hpp"
#include "patchide/spectral.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace patchide {
namespace {

using testing::constant_kernel;
using testing::patch_reduced_radius;
using testing::two_by_two_radius;
using testing::two_patch_kernel;

DiscreteOperator make_op(const KernelSpec& k, int panels = 4, int order = 4) {
  return assemble_operator(k, build_grid(k.partition(), panels, order));
}

KernelSpec weakly_coupled_kernel() {
  return KernelSpec(PatchPartition(1.0, {0.5}),
                    {KernelPiece::constant(0.6), KernelPiece::constant(0.01),
                     KernelPiece::constant(0.01), KernelPiece::constant(0.9)},
                    0.005, 1.0);
}

// Frozen oracle values; both routes must agree before they are trusted.
TEST(Oracle, PatchReducedAgreesWithCharacteristicPolynomial) {
  const auto k = two_patch_kernel();
  EXPECT_NEAR(patch_reduced_radius(k, 1.0), two_by_two_radius(0.6, 0.2, 0.2, 0.6), 1e-15);
  EXPECT_NEAR(patch_reduced_radius(k, 2.0), 1.6, 1e-14);
  EXPECT_NEAR(patch_reduced_radius(k, 1.2), 0.96, 1e-14);
}

TEST(PrincipalEigen, RankOne) {
  const auto pair = principal_eigen(make_op(constant_kernel(0.5, 1.0, 0.5, 1.5)), 2.0);
  EXPECT_NEAR(pair.lambda0, 2.0, 2e-10);
  EXPECT_LT((pair.phi0.array() - 1.0).abs().maxCoeff(), 1e-10);
  EXPECT_EQ(pair.iterations, 1);
  EXPECT_LE(pair.residual, 1e-12);
}

TEST(PrincipalEigen, TwoPatchMatchesOracle) {
  const auto k = two_patch_kernel();
  for (double r0 : {2.0, 1.2}) {
    const auto pair = principal_eigen(make_op(k), r0);
    const double oracle = patch_reduced_radius(k, r0);
    EXPECT_NEAR(pair.lambda0, oracle, 1e-10 * oracle) << r0;
    EXPECT_LT((pair.phi0.array() - 1.0).abs().maxCoeff(), 1e-10);
  }
}

TEST(PrincipalEigen, AsymmetricBlocksMatchOracle) {
  const KernelSpec spec(PatchPartition(1.0, {-0.3, 0.4}),
                        {KernelPiece::constant(0.8), KernelPiece::constant(0.3), KernelPiece::constant(0.2),
                         KernelPiece::constant(0.4), KernelPiece::constant(0.7), KernelPiece::constant(0.25),
                         KernelPiece::constant(0.15), KernelPiece::constant(0.35), KernelPiece::constant(0.9)},
                        0.1, 0.95);
  const auto pair = principal_eigen(make_op(spec, 2, 3), 1.5);
  const double oracle = patch_reduced_radius(spec, 1.5);
  EXPECT_NEAR(pair.lambda0, oracle, 1e-10 * oracle);
}

TEST(PrincipalEigen, InvariantsOfEigenpair) {
  const KernelSpec spec(PatchPartition(1.0, {-0.3, 0.4}),
                        {KernelPiece::exponential(0.8, 1.0), KernelPiece::constant(0.3),
                         KernelPiece::constant(0.2), KernelPiece::constant(0.4),
                         KernelPiece::exponential(0.7, 0.5), KernelPiece::constant(0.25),
                         KernelPiece::constant(0.15), KernelPiece::constant(0.35),
                         KernelPiece::exponential(0.9, 2.0)},
                        0.1, 0.9);
  const auto op = make_op(spec, 3, 4);
  const auto pair = principal_eigen(op, 2.5);
  EXPECT_GT(pair.lambda0, 0);
  EXPECT_GT(pair.phi0.minCoeff(), 0);
  EXPECT_EQ(pair.phi0.maxCoeff(), 1.0);
  EXPECT_LE(pair.residual, 1e-12);
  const Vector r = apply_T0(op, 2.5, pair.phi0) - pair.lambda0 * pair.phi0;
  EXPECT_EQ(r.cwiseAbs().maxCoeff(), pair.residual);
  EXPECT_EQ(pair.phi0_min, pair.phi0.minCoeff());
}

TEST(PrincipalEigen, LinearInR0) {
  const auto op = make_op(two_patch_kernel(), 3, 3);
  const double rho = principal_eigen(op, 1.0).lambda0;
  for (double r0 : {0.5, 1.7, 3.0}) EXPECT_NEAR(principal_eigen(op, r0).lambda0, r0 * rho, 1e-11);
}

TEST(PrincipalEigen, NoConvergenceWhenIterationCapTooSmall) {
  // Unequal patches with weak coupling: the constant start is far from phi0
  // and the second eigenvalue is close to the first.
  const auto op = make_op(weakly_coupled_kernel(), 4, 4);
  EigenOptions opts;
  opts.max_iter = 3;
  EXPECT_THROW(principal_eigen(op, 2.0, opts), NoConvergence);
}

TEST(PrincipalEigen, NoConvergenceOnUnreachableTolerance) {
  // Residuals bottom out at roundoff, far above 1e-30, and the plateau is detected.
  const auto op = make_op(KernelSpec::uniform(PatchPartition(1.0), KernelPiece::exponential(0.8, 1.3), 0.05, 1.0), 3, 6);
  EigenOptions opts;
  opts.tol = 1e-30;
  opts.stagnation_window = 200;
  EXPECT_THROW(principal_eigen(op, 2.0, opts), NoConvergence);
}

TEST(SpectralLowerBound, Examples) {
  const auto k2 = two_patch_kernel();
  const auto b2 = check_spectral_lower_bound(principal_eigen(make_op(k2), 2.0), k2, 2.0);
  EXPECT_NEAR(b2.lower_bound, 0.76, 1e-15);
  EXPECT_TRUE(b2.satisfied);
  EXPECT_TRUE(b2.phi0_positivity_satisfied);

  const auto k1 = constant_kernel(0.5, 1.0, 0.5, 1.5);
  const auto b1 = check_spectral_lower_bound(principal_eigen(make_op(k1), 2.0), k1, 2.0);
  EXPECT_DOUBLE_EQ(b1.lower_bound, 1.0);
  EXPECT_TRUE(b1.satisfied);
}

TEST(SpectralLowerBound, DetectsMisdeclaredDelta) {
  // delta = 2.5 on k = 1 on (-1, 1) is dishonest; the bound 2.5 * 2 = 5 exceeds lambda0.
  const auto k1 = constant_kernel(1.0, 1.0, 0.5, 3.0);
  const auto pair = principal_eigen(make_op(k1), 1.0);
  const auto liar = constant_kernel(1.0, 1.0, 2.5, 3.0);
  const auto b = check_spectral_lower_bound(pair, liar, 1.0);
  EXPECT_DOUBLE_EQ(b.lower_bound, 5.0);
  EXPECT_FALSE(b.satisfied);
}

TEST(Mortality, TwoPatchConfirmed) {
  const auto k = two_patch_kernel();
  const auto op = make_op(k);
  for (double r0 : {1.0, 0.9}) {
    const auto g = GrowthFunction::beverton_holt(r0, 1.0);
    const auto m = check_mortality_regime(op, g, op.grid());
    EXPECT_TRUE(m.hypotheses_hold);
    ASSERT_TRUE(m.lambda0.has_value());
    EXPECT_NEAR(*m.lambda0, patch_reduced_radius(k, r0), 1e-10);
    EXPECT_TRUE(m.confirmed);
    EXPECT_NEAR(m.max_kernel_mass, 0.8, 1e-14);
  }
}

TEST(Mortality, HypothesesFailForLargeMass) {
  const auto op = make_op(constant_kernel(1.0, 1.0, 0.5, 1.5));
  const auto m = check_mortality_regime(op, GrowthFunction::beverton_holt(0.9, 1.0), op.grid());
  EXPECT_FALSE(m.mass_at_most_one);
  EXPECT_FALSE(m.hypotheses_hold);
  EXPECT_FALSE(m.lambda0.has_value());
  EXPECT_FALSE(m.confirmed);
}

TEST(Mortality, InfluxOrSteepGrowthVoidsHypotheses) {
  const auto op = make_op(two_patch_kernel());
  EXPECT_FALSE(check_mortality_regime(op, GrowthFunction::beverton_holt(1.1, 1.0), op.grid()).hypotheses_hold);
  EXPECT_FALSE(check_mortality_regime(op, GrowthFunction::beverton_holt_with_influx(0.1, 0.9, 1.0), op.grid())
                   .hypotheses_hold);
}

}  // namespace
}  // namespace patchide
