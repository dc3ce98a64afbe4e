#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "guiltycut/region.hpp"

using namespace guiltycut;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

LocalizationSet unit_disc() { return LocalizationSet(Vector::Zero(2), 1.0); }

}  // namespace

TEST(Localization, HalfspaceMembership) {
  auto s = unit_disc();
  s.push_cut(Vector::Zero(2), v2(1.0, 0.0));
  EXPECT_TRUE(s.contains(v2(-0.5, 0.0)));
  EXPECT_FALSE(s.contains(v2(0.5, 0.0)));
  EXPECT_FALSE(s.contains(v2(-2.0, 0.0)));
}

TEST(Localization, ZeroNormalRejected) {
  auto s = unit_disc();
  EXPECT_THROW(s.push_cut(Vector::Zero(2), Vector::Zero(2)), ZeroNormalCut);
  EXPECT_EQ(s.num_cuts(), 0u);
}

TEST(Localization, NormalsAreStoredUnit) {
  auto s = unit_disc();
  s.push_cut(v2(0.2, 0.0), v2(3.0, 4.0));
  EXPECT_NEAR(s.normal_matrix().row(0).norm(), 1.0, 1e-15);
  EXPECT_NEAR(s.cut_slack(0, Vector::Zero(2)), 0.6 * 0.2, 1e-15);
}

TEST(Localization, ChordAgainstCutAndBall) {
  auto s = unit_disc();
  s.push_cut(v2(0.5, 0.0), v2(1.0, 0.0));
  const auto [lo, hi] = s.chord(Vector::Zero(2), v2(1.0, 0.0));
  EXPECT_NEAR(lo, -1.0, 1e-12);
  EXPECT_NEAR(hi, 0.5, 1e-12);
}

TEST(Sampling, DegenerateBallReturnsCenter) {
  Rng rng(1);
  const Vector y = v2(0.3, -2.0);
  EXPECT_EQ(sample_uniform_ball(y, 0.0, rng), y);
}

TEST(Sampling, MeanRadiusInTheDisc) {
  // E||u - y|| = d / (d + 1) for the uniform distribution on the unit d-ball
  Rng rng(7);
  const Vector y = v2(1.0, 1.0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += (sample_uniform_ball(y, 1.0, rng) - y).norm();
  EXPECT_NEAR(sum / n, 2.0 / 3.0, 0.01);
}

TEST(Sampling, SeedReproducible) {
  Rng a(42), b(42);
  EXPECT_EQ(sample_uniform_ball(Vector::Zero(3), 1.0, a), sample_uniform_ball(Vector::Zero(3), 1.0, b));
}

TEST(Sampling, HitAndRunStaysInside) {
  auto s = unit_disc();
  s.push_cut(Vector::Zero(2), v2(1.0, 1.0));
  Rng rng(3);
  Vector x = v2(-0.2, -0.2);
  for (int i = 0; i < 2000; ++i) {
    x = hit_and_run_step(s, x, rng).point;
    ASSERT_TRUE(s.contains(x));
  }
}

TEST(Center, FullBallIsItsOwnCenter) {
  const auto s = unit_disc();
  Rng rng(5);
  EXPECT_LE(center(s, CenterOracle::analytic(), v2(0.3, 0.1), rng).norm(), 1e-6);
  EXPECT_LE(center(s, CenterOracle::sampled_centroid(), v2(0.3, 0.1), rng).norm(), 0.3);
}

TEST(Center, AnalyticCenterOfHalfDisc) {
  // On the x1 axis the barrier is -log(-x) - log(1 - x^2); its derivative
  // vanishes at 1 - x^2 = 2 x^2, i.e. x = -1/sqrt(3).
  auto s = unit_disc();
  s.push_cut(Vector::Zero(2), v2(1.0, 0.0));
  Rng rng(0);
  const Vector c = center(s, CenterOracle::analytic(), v2(-0.5, 0.2), rng);
  EXPECT_NEAR(c(0), -1.0 / std::sqrt(3.0), 1e-6);
  EXPECT_NEAR(c(1), 0.0, 1e-6);
}

TEST(Center, InfeasibleWarmStartRecovers) {
  auto s = unit_disc();
  s.push_cut(Vector::Zero(2), v2(1.0, 0.0));
  Rng rng(0);
  try {
    const Vector c = center(s, CenterOracle::analytic(), v2(0.9, 0.0), rng);
    EXPECT_TRUE(s.contains_strictly(c));
  } catch (const EmptyInteriorSuspected&) {
    SUCCEED();
  }
}

TEST(Center, SampledCentroidInsideCutRegion) {
  auto s = unit_disc();
  s.push_cut(v2(0.2, 0.0), v2(1.0, 0.0));
  s.push_cut(v2(0.0, -0.1), v2(0.0, -1.0));
  Rng rng(9);
  const Vector c = center(s, CenterOracle::sampled_centroid(), v2(-0.3, 0.3), rng);
  EXPECT_TRUE(s.contains_strictly(c));
}

TEST(Volume, FullDisc) {
  Rng rng(1);
  const auto est = estimate_volume_mc(unit_disc(), 100000, rng);
  EXPECT_NEAR(est.estimate, std::numbers::pi, 3.0 * est.std_error);
}

TEST(Volume, HalfDisc) {
  auto s = unit_disc();
  s.push_cut(Vector::Zero(2), v2(0.0, 1.0));
  Rng rng(2);
  const auto est = estimate_volume_mc(s, 100000, rng);
  EXPECT_NEAR(est.estimate, std::numbers::pi / 2, 3.0 * est.std_error);
}

TEST(Volume, QuarterDisc) {
  auto s = unit_disc();
  s.push_cut(Vector::Zero(2), v2(1.0, 0.0));
  s.push_cut(Vector::Zero(2), v2(0.0, 1.0));
  Rng rng(3);
  const auto est = estimate_volume_mc(s, 100000, rng);
  EXPECT_NEAR(est.estimate, std::numbers::pi / 4, 3.0 * est.std_error);
}

TEST(Volume, HighDimensionRefused) {
  Rng rng(0);
  EXPECT_THROW(estimate_volume_mc(LocalizationSet(Vector::Zero(4), 1.0), 10, rng), DimensionTooLarge);
}

TEST(CenterOracle, TauRange) {
  CenterOracle c;
  c.tau = 0.0;
  EXPECT_THROW(c.validate(), ConfigurationError);
  c.tau = 0.6;
  EXPECT_THROW(c.validate(), ConfigurationError);
}
