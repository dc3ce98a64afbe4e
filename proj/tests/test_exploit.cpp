#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "guiltycut/corpus.hpp"
#include "guiltycut/exploit.hpp"

using namespace guiltycut;

namespace {

// Polynomial along the first axis: f(x) = p(x1) + x2^2 / 2.
class AxisPoly final : public OracleFunction {
 public:
  explicit AxisPoly(std::array<double, 4> c) : OracleFunction(2, 1.0, 1.0, ValidityBall{}), c_(c) {}
  double p(double t) const { return c_[0] + c_[1] * t + c_[2] * t * t + c_[3] * t * t * t; }
  double eval_value(const Vector& x) const override { return p(x(0)) + 0.5 * x(1) * x(1); }
  Vector eval_gradient(const Vector& x) const override {
    const double t = x(0);
    return (Vector(2) << c_[1] + 2 * c_[2] * t + 3 * c_[3] * t * t, x(1)).finished();
  }
  Matrix eval_hessian(const Vector& x) const override {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 2 * c_[2] + 6 * c_[3] * x(0);
    h(1, 1) = 1.0;
    return h;
  }
  Matrix eval_third_contract(const Vector&, const Vector& s) const override {
    Matrix t = Matrix::Zero(2, 2);
    t(0, 0) = 6 * c_[3] * s(0);
    return t;
  }

 private:
  std::array<double, 4> c_;
};

const Vector kOrigin = Vector::Zero(2);
const Vector kE1 = Vector::Unit(2, 0);

}  // namespace

TEST(Exploit, ConcaveParabolaTiesGoToPlus12R) {
  const AxisPoly f({0.0, 0.0, -10.5, 0.0});
  const ExploitStep s = exploit_nc_step(f, kOrigin, kE1, 1.0);
  EXPECT_DOUBLE_EQ(s.theta, 12.0);
  EXPECT_DOUBLE_EQ(s.value, -1512.0);
  EXPECT_LE(s.value, f.eval_value(kOrigin) - 536.0);
}

TEST(Exploit, CubicWithWitness) {
  const AxisPoly f({0.0, 0.0, 0.0, 1.0});
  EXPECT_TRUE(check_curvature_witness(f, kOrigin, kE1, -1.0, 0.2, 1.0));
  const ExploitStep s = exploit_nc_step(f, kOrigin, kE1, 1.0);
  EXPECT_DOUBLE_EQ(s.theta, -12.0);
  EXPECT_DOUBLE_EQ(s.value, -1728.0);
  EXPECT_LE(s.value, 0.0 - 536.0 * 0.2);
}

TEST(Exploit, ConvexInputStillReturnsBestCandidate) {
  const AxisPoly f({0.0, 1.0, 0.5, 0.0});
  const ExploitStep s = exploit_nc_step(f, kOrigin, kE1, 0.1);
  double best = f.eval_value(1.2 * kE1);
  for (double t : {0.9, -0.9, -1.2}) best = std::min(best, f.eval_value(t * kE1));
  EXPECT_EQ(s.value, best);
  EXPECT_FALSE(check_curvature_witness(f, kOrigin, kE1, 0.3, 1.0, 0.1));
}

TEST(Exploit, WitnessBoundaryIsInclusive) {
  // q'' = 2 c2 = -21 L3 R^2 exactly with L3 = 1/21 and R = 1
  const AxisPoly f({0.0, 0.0, -0.5, 0.0});
  EXPECT_TRUE(check_curvature_witness(f, kOrigin, kE1, 0.0, 1.0 / 21.0, 1.0));
}

TEST(Exploit, DirectionMustBeUnit) {
  const AxisPoly f({0.0, 0.0, 1.0, 0.0});
  EXPECT_THROW(exploit_nc_step(f, kOrigin, 2.0 * kE1, 1.0), ConfigurationError);
  EXPECT_THROW(check_curvature_witness(f, kOrigin, kE1, 1.5, 1.0, 1.0), ConfigurationError);
}

TEST(MinEig, Identity) {
  const EigenPair e = min_eigpair(Matrix::Identity(3, 3));
  EXPECT_DOUBLE_EQ(e.lambda_min, 1.0);
  EXPECT_NEAR(e.direction.norm(), 1.0, 1e-15);
}

TEST(MinEig, Diagonal) {
  const EigenPair e = min_eigpair(Vector((Vector(2) << 2.0, -3.0).finished()).asDiagonal());
  EXPECT_DOUBLE_EQ(e.lambda_min, -3.0);
  EXPECT_NEAR(std::abs(e.direction(1)), 1.0, 1e-15);
}

TEST(MinEig, DoubleWellSaddle) {
  const auto f = corpus_get("doublewell2d");
  EXPECT_DOUBLE_EQ(min_eigpair(f->eval_hessian(Vector::Zero(2))).lambda_min, -4.0);
}

TEST(MinEig, RejectsNonSquare) { EXPECT_THROW(min_eigpair(Matrix::Zero(2, 3)), ConfigurationError); }
