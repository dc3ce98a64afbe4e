#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "scripted_doublewell.hpp"
#include "guiltycut/corpus.hpp"
#include "guiltycut/trust_region.hpp"

using namespace guiltycut;

namespace {

double radius_for(double eps, double L3) { return std::pow(L3, -1.0 / 3.0) * std::cbrt(eps) / 3.0; }

// ||x - c||^2 / 2 with c far from the start.
class FarQuadratic final : public OracleFunction {
 public:
  explicit FarQuadratic(Vector c) : OracleFunction(static_cast<int>(c.size()), 1.0, 1.0, ValidityBall{}), c_(c) {}
  double eval_value(const Vector& x) const override { return 0.5 * (x - c_).squaredNorm(); }
  Vector eval_gradient(const Vector& x) const override { return x - c_; }
  Matrix eval_hessian(const Vector&) const override { return Matrix::Identity(dim(), dim()); }
  Matrix eval_third_contract(const Vector&, const Vector&) const override { return Matrix::Zero(dim(), dim()); }

 private:
  Vector c_;
};

// Replays the scripted centers, then keeps returning the last one so the
// region stops shrinking.
CenterRule replay_then_hold(std::vector<Vector> centers) {
  auto list = std::make_shared<std::vector<Vector>>(std::move(centers));
  auto next = std::make_shared<std::size_t>(0);
  return [list, next](const LocalizationSet&, const Vector&) -> Vector {
    const std::size_t i = std::min(*next, list->size() - 1);
    ++*next;
    return (*list)[i];
  };
}

}  // namespace

TEST(TrustRegion, Formulas) {
  EXPECT_DOUBLE_EQ(progress_bound(1.0, 1.0, 1.0), std::min(10.0, 1.0 / 168.0));
  EXPECT_EQ(cut_budget(2, 0.5, 1.0, 1.0, 8.0), 1);
  EXPECT_EQ(cut_budget(2, 0.25, 10.0, 1.0, 1.0), static_cast<int>(std::ceil(8.0 * std::log(80.0))));
}

TEST(TrustRegion, ConvexStartIsSecondOrderStationary) {
  const ConvexQuadratic f(2);
  const double eps = 3.0;
  Rng rng(1);
  const auto out =
      cutting_trust_region(f, (Vector(2) << 1.0, 0.0).finished(), eps, 1.0, 1.0, radius_for(eps, 1.0), {}, rng);
  EXPECT_EQ(out.status, TrustRegionStatus::SecondOrderStationary);
  EXPECT_EQ(out.branch, Branch::grad_small_curv_ok);
  EXPECT_LE(f.eval_gradient(out.z_plus).norm(), eps);
}

TEST(TrustRegion, SaddleStartTakesCurvatureStep) {
  const auto f = corpus_get("doublewell2d");
  const double eps = 1e-2, L3 = 24.0, R = radius_for(eps, L3);
  Rng rng(2);
  const auto out = cutting_trust_region(*f, Vector::Zero(2), eps, f->lipschitz_g1(), L3, R, {}, rng);
  EXPECT_EQ(out.branch, Branch::grad_small_curv_bad);
  EXPECT_EQ(out.status, TrustRegionStatus::Progress);
  ASSERT_TRUE(out.lambda_min.has_value());
  EXPECT_DOUBLE_EQ(*out.lambda_min, -4.0);
  EXPECT_NEAR(out.alpha, 21.0 / 9.0 * std::cbrt(L3) * std::pow(eps, 2.0 / 3.0), 1e-12);
  EXPECT_GE(out.decrease, 10.0 * L3 * std::pow(R, 4) - 1e-12);
}

TEST(TrustRegion, FarMinimizerEscapesBall) {
  const FarQuadratic f((Vector(2) << 10.0, 0.0).finished());
  const double eps = 1e-2, L3 = 1.0, R = radius_for(eps, L3);
  Rng rng(3);
  const auto out = cutting_trust_region(f, Vector::Zero(2), eps, 1.0, L3, R, {}, rng);
  EXPECT_EQ(out.branch, Branch::escaped_ball);
  EXPECT_GE(out.decrease, 10.5 * L3 * std::pow(R, 4) - 1e-12);
}

TEST(TrustRegion, LargeRadiusFindsProxStationaryPoint) {
  // L3 far below the true value makes alpha tiny and R large; the cut loop
  // then settles on a stationary point of the proximal function inside the ball
  const auto f = corpus_get("doublewell2d");
  TrustRegionOptions opts;
  opts.assert_progress = false;
  Rng rng(4);
  const Vector z = (Vector(2) << 0.3, -0.2).finished();
  const auto out = cutting_trust_region(*f, z, 1e-2, f->lipschitz_g1(), 0.1, 1.5, opts, rng);
  EXPECT_EQ(out.branch, Branch::prox_stationary);
  EXPECT_EQ(out.certificate, CertificateCase::StationaryOfProx);
  EXPECT_GT(out.decrease, 0.0);
}

TEST(TrustRegion, ScriptedCentersExposeNonconvexPair) {
  const auto f = corpus_get("doublewell2d");
  TrustRegionOptions opts;
  opts.assert_progress = false;
  opts.center_rule = replay_then_hold(scripted_doublewell::scripted_centers());
  Rng rng(5);
  const Vector z = scripted_doublewell::start();
  const auto out =
      cutting_trust_region(*f, z, 2.0 * scripted_doublewell::kEpsHat, f->lipschitz_g1(), 1e-6, scripted_doublewell::kRadius, opts, rng);
  ASSERT_EQ(out.branch, Branch::nonconvex_pair);
  ASSERT_TRUE(out.exploit_center && out.exploit_direction);
  EXPECT_NEAR(out.exploit_direction->norm(), 1.0, 1e-12);
  const ExploitStep step = exploit_nc_step(*f, *out.exploit_center, *out.exploit_direction, scripted_doublewell::kRadius);
  EXPECT_EQ(out.z_plus, step.point);
}

TEST(TrustRegion, FirstOrderSkipsHessian) {
  const auto f = corpus_get("doublewell2d");
  TrustRegionOptions opts;
  opts.first_order = true;
  Rng rng(6);
  const auto out = cutting_trust_region(*f, Vector::Zero(2), 1e-2, f->lipschitz_g1(), 24.0, radius_for(1e-2, 24.0),
                                        opts, rng);
  EXPECT_EQ(out.status, TrustRegionStatus::FirstOrderStationary);
  EXPECT_EQ(f->counters().n2, 0u);
}

TEST(TrustRegion, FlippedAlphaBreaksTheGuarantee) {
  const ConvexQuadratic f(2);
  TrustRegionOptions opts;
  opts.alpha_scale = -1.0;
  const double eps = 0.1, R = radius_for(eps, 1.0);
  bool failed = false;
  for (int seed = 0; seed < 20 && !failed; ++seed) {
    Rng rng(seed);
    const Vector z = sample_uniform_ball(Vector::Zero(2), 1.0, rng);
    try {
      cutting_trust_region(f, z, eps, 1.0, 1.0, R, opts, rng);
    } catch (const Error&) {
      failed = true;
    }
  }
  EXPECT_TRUE(failed);
}

TEST(TrustRegion, RejectsNonPositiveConstants) {
  const ConvexQuadratic f(2);
  Rng rng(0);
  EXPECT_THROW(cutting_trust_region(f, Vector::Ones(2), 0.0, 1.0, 1.0, 1.0, {}, rng), ConfigurationError);
  EXPECT_THROW(cutting_trust_region(f, Vector::Ones(2), 1.0, 1.0, -1.0, 1.0, {}, rng), ConfigurationError);
}
