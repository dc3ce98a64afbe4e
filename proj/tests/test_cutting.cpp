#include <gtest/gtest.h>

#include <cmath>

#include "scripted_doublewell.hpp"
#include "guiltycut/corpus.hpp"
#include "guiltycut/cutting.hpp"
#include "guiltycut/trace2d.hpp"
#include "guiltycut/trust_region.hpp"

using namespace guiltycut;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }

// -x^2 in one dimension.
class NegSquare final : public OracleFunction {
 public:
  NegSquare() : OracleFunction(1, 2.0, 1.0, ValidityBall{}) {}
  double eval_value(const Vector& x) const override { return -x.squaredNorm(); }
  Vector eval_gradient(const Vector& x) const override { return -2.0 * x; }
  Matrix eval_hessian(const Vector&) const override { return Matrix::Constant(1, 1, -2.0); }
  Matrix eval_third_contract(const Vector&, const Vector&) const override { return Matrix::Zero(1, 1); }
};

}  // namespace

TEST(CuttingPlane, ConvexMinimizerNeverCut) {
  const ConvexQuadratic f(2);
  Rng rng(4);
  const CuttingRun run = cutting_plane_method(f, (Vector(2) << 1.0, 0.0).finished(), 10, 2.0,
                                              CenterOracle::analytic(), rng);
  EXPECT_EQ(run.iterates.size(), 11u);
  for (std::size_t t = 0; t <= run.region.num_cuts(); ++t)
    EXPECT_TRUE(region_prefix(run.region, t).contains(Vector::Zero(2))) << "t = " << t;
  EXPECT_EQ(f.counters().n_center, 10u);
}

TEST(CuttingPlane, StopsOnZeroGradient) {
  const ConvexQuadratic f(2);
  Rng rng(0);
  const CuttingRun run = cutting_plane_method(f, Vector::Zero(2), 5, 1.0, CenterOracle::analytic(), rng);
  ASSERT_TRUE(run.early_stop.has_value());
  EXPECT_EQ(*run.early_stop, 0u);
  EXPECT_EQ(run.region.num_cuts(), 0u);
}

TEST(CuttingPlane, BudgetMustBePositive) {
  const ConvexQuadratic f(2);
  Rng rng(0);
  EXPECT_THROW(cutting_plane_method(f, Vector::Ones(2), 0, 1.0, CenterOracle::analytic(), rng), ConfigurationError);
}

TEST(Certificate, SampleBudget) { EXPECT_EQ(certificate_sample_budget(), 2624); }

TEST(Certificate, ConvexRunEndsProxStationary) {
  const ConvexQuadratic f(2);
  Rng rng(8);
  const CuttingRun run = cutting_plane_method(f, (Vector(2) << 1.0, 0.0).finished(), 60, 2.0,
                                              CenterOracle::analytic(), rng);
  const auto cert = nonconvexity_certificate(f, run, 1.0, 1e-3, 2.0, rng);
  EXPECT_EQ(cert.kind, CertificateCase::StationaryOfProx);
  EXPECT_EQ(cert.K, 0);
  EXPECT_LE(cert.u.norm(), 1e-3);
}

TEST(Certificate, SamplePastEarlierCutGivesPair) {
  // Hand-built run on -x^2: a cut at -0.5 keeps x <= -0.5, a cut at 0.9
  // keeps x >= 0.9. The best iterate is 0.9, so samples land near
  // 0.9 + 1.8 / 4 = 1.35, past the first cut and inside the ball.
  const NegSquare f;
  CuttingRun run{LocalizationSet(v1(-0.5), 2.0), {}, {}, std::nullopt, std::nullopt};
  for (double x : {-0.5, 0.9}) {
    run.iterates.push_back(v1(x));
    run.gradients.push_back(f.eval_gradient(v1(x)));
    run.region.push_cut(v1(x), run.gradients.back());
  }
  Rng rng(1);
  const auto cert = nonconvexity_certificate(f, run, 4.0, 0.1, 2.0, rng);
  ASSERT_EQ(cert.kind, CertificateCase::NonconvexPair);
  ASSERT_EQ(cert.v_index, 0u);
  const double u = cert.u(0);
  EXPECT_FALSE(run.region.contains(cert.u));
  // -u^2 < -0.25 + 1 * (u + 0.5), checked directly
  EXPECT_LT(-u * u, -0.25 + (u + 0.5));
  EXPECT_LE(cert.fhat_u, cert.fhat_best);
}

TEST(Certificate, EscapeIsReported) {
  const NegSquare f;
  CuttingRun run{LocalizationSet(v1(0.5), 0.2), {}, {}, std::nullopt, std::nullopt};
  run.iterates.push_back(v1(0.5));
  run.gradients.push_back(f.eval_gradient(v1(0.5)));
  run.region.push_cut(v1(0.5), run.gradients.back());
  Rng rng(2);
  const auto cert = nonconvexity_certificate(f, run, 2.0, 0.1, 0.2, rng);
  EXPECT_EQ(cert.kind, CertificateCase::EscapedBall);
  EXPECT_GT((cert.u - v1(0.5)).norm(), 0.2);
}

TEST(Certificate, TooSmallLipschitzIsDetected) {
  // with L̂1 far below the true curvature the gradient step overshoots on a
  // convex quadratic and the sample increases f
  const ConvexQuadratic f(1);
  CuttingRun run{LocalizationSet(v1(1.0), 5.0), {v1(1.0)}, {v1(1.0)}, std::nullopt, std::nullopt};
  run.region.push_cut(v1(1.0), v1(1.0));
  Rng rng(3);
  EXPECT_THROW(nonconvexity_certificate(f, run, 0.1, 1e-3, 5.0, rng), CertificateInvariantViolated);
}

TEST(Certificate, ScriptedDoubleWellRun) {
  const Trace2d tr = scripted_doublewell::scripted_trace();
  ASSERT_EQ(tr.run.region.num_cuts(), 3u);
  EXPECT_TRUE(final_region_excludes_markers(tr));
  ASSERT_TRUE(tr.certificate.has_value()) << tr.certificate_error;
  EXPECT_EQ(tr.certificate->kind, CertificateCase::NonconvexPair);
  EXPECT_TRUE(tr.certificate_strict);
}

TEST(Certificate, KIsSmallOnAverage) {
  // after the full cut budget the gradient step from x_best leaves S with
  // probability at least one half, so K is dominated by a geometric law
  const auto f = corpus_get("doublewell2d");
  const double R = 0.5, alpha = 1.0, epshat = 1e-2;
  Rng rng(20);
  double sum = 0.0;
  int n = 0, big = 0;
  for (int i = 0; i < 200; ++i) {
    const Vector x0 = (Vector(2) << 0.2, 0.1).finished() + 0.3 * standard_normal(2, rng);
    const ProxFunction fhat(*f, x0, alpha);
    const int N = cut_budget(2, CenterOracle{}.tau, fhat.lipschitz_g1(), R, epshat);
    const CuttingRun run = cutting_plane_method(fhat, x0, N, R, CenterOracle::analytic(), rng);
    const auto cert = nonconvexity_certificate(fhat, run, fhat.lipschitz_g1(), epshat, R, rng);
    if (cert.kind == CertificateCase::StationaryOfProx) continue;
    sum += cert.K;
    big += cert.K >= 8;
    ++n;
  }
  ASSERT_GT(n, 100);
  EXPECT_LE(sum / n, 2.0);
  const double q = std::pow(2.0, -7);
  EXPECT_LE(static_cast<double>(big) / n, q + 3.0 * std::sqrt(q * (1 - q) / n));
}
