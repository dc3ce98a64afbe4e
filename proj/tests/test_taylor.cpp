#include <gtest/gtest.h>

#include <cmath>

#include "guiltycut/corpus.hpp"
#include "guiltycut/exploit.hpp"
#include "guiltycut/region.hpp"
#include "guiltycut/taylor_model.hpp"

using namespace guiltycut;

TEST(TaylorModel, QuadraticPlusQuarticPenalty) {
  const ConvexQuadratic f(2);
  const Vector z = (Vector(2) << 0.5, -1.0).finished();
  const auto m = taylor3_model(f, z);
  const Vector x = (Vector(2) << 1.5, 0.0).finished();
  const double h2 = (x - z).squaredNorm();
  EXPECT_NEAR(m->eval_value(x), f.eval_value(x) + f.lipschitz_g3() / 12.0 * h2 * h2, 1e-13);
  EXPECT_EQ(m->eval_gradient(z), f.eval_gradient(z));
}

TEST(TaylorModel, ReproducesQuarticTaylorData) {
  const auto f = corpus_get("random_quartic", 2, 3);
  const Vector z = (Vector(3) << 0.3, -0.2, 0.6).finished();
  const auto m = taylor3_model(*f, z);
  EXPECT_NEAR(m->eval_value(z), f->eval_value(z), 1e-12);
  EXPECT_LE((m->eval_gradient(z) - f->eval_gradient(z)).norm(), 1e-12);
  EXPECT_LE((m->eval_hessian(z) - f->eval_hessian(z)).norm(), 1e-12);
  for (int k = 0; k < 3; ++k)
    EXPECT_LE((m->eval_third_contract(z, Vector::Unit(3, k)) - f->eval_third_contract(z, Vector::Unit(3, k))).norm(),
              1e-12);
}

TEST(TaylorModel, OneOrderThreeCallThenSilence) {
  const auto f = corpus_get("doublewell2d");
  const Vector z = (Vector(2) << 0.4, 0.9).finished();
  const auto m = taylor3_model(*f, z, 1.0);
  EXPECT_EQ(f->counters().n3, 1u);
  const EvalCounters after_build = f->counters();
  m->value(z);
  m->gradient(z + Vector::Ones(2));
  m->hessian(z);
  EXPECT_EQ(f->counters(), after_build);
  EXPECT_DOUBLE_EQ(m->lipschitz_g1(), 2.0 * f->lipschitz_g1());
  EXPECT_DOUBLE_EQ(m->lipschitz_g3(), 2.0 * f->lipschitz_g3());
}

TEST(TaylorModel, UpperBoundsDoubleWell) {
  const auto f = corpus_get("doublewell2d");
  Rng rng(13);
  for (int k = 0; k < 20; ++k) {
    const Vector z = sample_uniform_ball(Vector::Zero(2), 1.5, rng);
    const auto m = taylor3_model(*f, z);
    for (int i = 0; i < 100; ++i) {
      const Vector x = sample_uniform_ball(z, 1.5, rng);
      EXPECT_GE(m->eval_value(x), f->eval_value(x) - 1e-10);
    }
  }
}

TEST(TaylorModel, DeviationBounds) {
  const auto f = corpus_get("doublewell2d");
  const double L3 = f->lipschitz_g3();
  Rng rng(17);
  const Vector z = (Vector(2) << 0.2, -0.4).finished();
  const auto m = taylor3_model(*f, z);
  for (int i = 0; i < 100; ++i) {
    const Vector x = sample_uniform_ball(z, 1.0, rng);
    const double r = (x - z).norm();
    EXPECT_LE((f->eval_gradient(x) - m->eval_gradient(x)).norm(), L3 / 3.0 * r * r * r + 1e-8);
    const Matrix dH = f->eval_hessian(x) - m->eval_hessian(x);
    const double op = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (dH + dH.transpose())).eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_LE(op, L3 * r * r + 1e-8);
  }
}

TEST(TaylorModel, FiniteDifferencesAgree) {
  const auto f = corpus_get("rosenbrock2d");
  const auto m = taylor3_model(*f, (Vector(2) << -0.5, 0.7).finished());
  EXPECT_TRUE(finite_difference_check(*m, (Vector(2) << -0.2, 0.4).finished()).passed);
}
