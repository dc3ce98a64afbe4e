#include <gtest/gtest.h>

#include <cmath>

#include "guiltycut/corpus.hpp"
#include "guiltycut/oracle.hpp"
#include "guiltycut/region.hpp"

using namespace guiltycut;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

// Gradient off by a constant 0.1 in every coordinate.
class BrokenGradient final : public OracleFunction {
 public:
  BrokenGradient() : OracleFunction(2, 1.0, 1.0, ValidityBall{}) {}
  double eval_value(const Vector& x) const override { return 0.5 * x.squaredNorm(); }
  Vector eval_gradient(const Vector& x) const override { return x.array() + 0.1; }
  Matrix eval_hessian(const Vector&) const override { return Matrix::Identity(2, 2); }
  Matrix eval_third_contract(const Vector&, const Vector&) const override { return Matrix::Zero(2, 2); }
};

}  // namespace

TEST(FiniteDifference, QuadraticIsExact) {
  const ConvexQuadratic f(2);
  const auto rep = finite_difference_check(f, vec({1.0, 1.0}));
  EXPECT_TRUE(rep.passed);
  EXPECT_LE(rep.gradient_error, 1e-8);
}

TEST(FiniteDifference, DoubleWellAllOrders) {
  const auto f = corpus_get("doublewell2d");
  const auto rep = finite_difference_check(*f, vec({0.3, -0.7}), 1e-5);
  EXPECT_TRUE(rep.passed) << rep.max_error();
}

TEST(FiniteDifference, WrongGradientIsCaught) {
  const BrokenGradient f;
  const auto rep = finite_difference_check(f, vec({0.2, 0.4}));
  EXPECT_FALSE(rep.passed);
  EXPECT_GE(rep.max_error(), 0.05);
}

TEST(FiniteDifference, WholeCorpus) {
  for (const auto& name : corpus_names()) {
    const auto f = corpus_get(name, 3, 3);
    Rng rng(11);
    for (int k = 0; k < 4; ++k) {
      const Vector x = default_start(name, f->dim()) + 0.3 * standard_normal(f->dim(), rng);
      const auto rep = finite_difference_check(*f, x, 1e-5);
      EXPECT_TRUE(rep.passed) << name << " max error " << rep.max_error();
    }
  }
}

TEST(Corpus, DoubleWellAtOrigin) {
  const auto f = corpus_get("doublewell2d");
  const Vector o = Vector::Zero(2);
  EXPECT_DOUBLE_EQ(f->eval_value(o), 2.0);
  EXPECT_EQ(f->eval_gradient(o), Vector::Zero(2));
  EXPECT_EQ(f->eval_hessian(o), Matrix(Vector::Constant(2, -4.0).asDiagonal()));
  EXPECT_DOUBLE_EQ(f->lipschitz_g3(), 24.0);
}

TEST(Corpus, DoubleWellThirdDerivativeSlopeIs24) {
  // third derivative along e1 is 24 x1, so its change over a unit step is 24
  const auto f = corpus_get("doublewell2d");
  const Vector e1 = Vector::Unit(2, 0);
  const Matrix d = f->eval_third_contract(vec({0.7, 0.2}), e1) - f->eval_third_contract(vec({-0.3, 0.2}), e1);
  EXPECT_NEAR(d(0, 0), 24.0, 1e-12);
}

TEST(Corpus, ConvexQuadraticMinimizer) {
  const auto f = corpus_get("convex_quadratic");
  EXPECT_EQ(f->eval_value(Vector::Zero(2)), 0.0);
  EXPECT_EQ(f->eval_gradient(Vector::Zero(2)), Vector::Zero(2));
}

TEST(Corpus, SlowTailConstants) {
  // sup |f''| and sup |f''''| of 10 (1 + x^2)^(-1/10), by dense sampling of
  // central differences of the analytic third derivative
  const auto f = corpus_get("slow_tail1d");
  double g2 = 0.0, g4 = 0.0;
  const double h = 1e-5;
  for (double x = -6.0; x <= 6.0; x += 1e-3) {
    const Vector p = Vector::Constant(1, x);
    g2 = std::max(g2, std::abs(f->eval_hessian(p)(0, 0)));
    const double t4 = (f->eval_third_contract(Vector::Constant(1, x + h), Vector::Ones(1))(0, 0) -
                       f->eval_third_contract(Vector::Constant(1, x - h), Vector::Ones(1))(0, 0)) /
                      (2 * h);
    g4 = std::max(g4, std::abs(t4));
  }
  EXPECT_LE(g2, f->lipschitz_g1());
  EXPECT_LE(g4, f->lipschitz_g3());
  EXPECT_GT(g4, 0.9 * f->lipschitz_g3());
}

TEST(Corpus, UnknownNameThrows) { EXPECT_THROW(corpus_get("nope"), UnknownProblem); }

TEST(Corpus, RandomQuarticIsSeeded) {
  const auto a = corpus_get("random_quartic", 5, 3);
  const auto b = corpus_get("random_quartic", 5, 3);
  const auto c = corpus_get("random_quartic", 6, 3);
  const Vector x = vec({0.1, -0.4, 0.9});
  EXPECT_EQ(a->eval_value(x), b->eval_value(x));
  EXPECT_NE(a->eval_value(x), c->eval_value(x));
}

TEST(Counters, EachCallBumpsItsOrder) {
  const auto f = corpus_get("doublewell2d");
  const Vector x = vec({0.5, 0.5});
  f->value(x);
  f->gradient(x);
  f->gradient(x);
  f->hessian(x);
  f->third_contract(x, x);
  f->taylor3(x);
  const EvalCounters c = f->counters();
  EXPECT_EQ(c.n0, 1u);
  EXPECT_EQ(c.n1, 2u);
  EXPECT_EQ(c.n2, 1u);
  EXPECT_EQ(c.n3, 2u);
  f->eval_value(x);
  f->eval_gradient(x);
  EXPECT_EQ(f->counters(), c);
  f->reset_counters();
  EXPECT_EQ(f->counters(), EvalCounters{});
}

TEST(Counters, ProxSharesBaseCounters) {
  const auto f = corpus_get("doublewell2d");
  const ProxFunction p(*f, vec({1.0, 0.0}), 2.0);
  p.gradient(vec({0.0, 0.0}));
  EXPECT_EQ(f->counters().n1, 1u);
  // f + (alpha/2) ||z - x||^2 with gradient f' + alpha (x - z)
  EXPECT_DOUBLE_EQ(p.eval_value(Vector::Zero(2)), 2.0 + 1.0);
  EXPECT_EQ(p.eval_gradient(Vector::Zero(2)), vec({-2.0, 0.0}));
  EXPECT_DOUBLE_EQ(p.lipschitz_g1(), f->lipschitz_g1() + 2.0);
}

TEST(Validity, BallCovers) {
  const ValidityBall b{Vector::Zero(2), 3.0};
  EXPECT_TRUE(b.covers(vec({1.0, 0.0}), 2.0));
  EXPECT_FALSE(b.covers(vec({1.0, 0.0}), 2.1));
  EXPECT_TRUE(ValidityBall{}.covers(vec({1e9, 0.0}), 1e9));
}
