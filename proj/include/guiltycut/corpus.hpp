#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "guiltycut/oracle.hpp"

namespace guiltycut {

/// Sum over coordinates of (x_i^2 - 1)^2.
///
/// Constants hold on the ball of radius 3 about the origin: the Hessian is
/// diag(12 x_i^2 - 4), so L1 = 12*9 - 4; the fourth derivative along a unit
/// direction is 24 * sum s_i^4 <= 24.
class DoubleWell final : public OracleFunction {
 public:
  static constexpr double kValidityRadius = 3.0;

  explicit DoubleWell(int dim)
      : OracleFunction(dim, 12.0 * kValidityRadius * kValidityRadius - 4.0, 24.0,
                       ValidityBall{Vector::Zero(dim), kValidityRadius}) {}

  std::string name() const override { return "doublewell" + std::to_string(dim()) + "d"; }

  double eval_value(const Vector& x) const override {
    return (x.array().square() - 1.0).square().sum();
  }
  Vector eval_gradient(const Vector& x) const override {
    return (4.0 * x.array() * (x.array().square() - 1.0)).matrix();
  }
  Matrix eval_hessian(const Vector& x) const override {
    return (12.0 * x.array().square() - 4.0).matrix().asDiagonal();
  }
  Matrix eval_third_contract(const Vector& x, const Vector& s) const override {
    return (24.0 * x.array() * s.array()).matrix().asDiagonal();
  }
};

/// ||x||^2 / 2. Third derivatives vanish, so any positive L3 is valid.
class ConvexQuadratic final : public OracleFunction {
 public:
  explicit ConvexQuadratic(int dim = 2) : OracleFunction(dim, 1.0, 1.0, ValidityBall{}) {}

  std::string name() const override { return "convex_quadratic"; }

  double eval_value(const Vector& x) const override { return 0.5 * x.squaredNorm(); }
  Vector eval_gradient(const Vector& x) const override { return x; }
  Matrix eval_hessian(const Vector&) const override { return Matrix::Identity(dim(), dim()); }
  Matrix eval_third_contract(const Vector&, const Vector&) const override {
    return Matrix::Zero(dim(), dim());
  }
};

/// (1 - x)^2 + 100 (y - x^2)^2 on the ball of radius 2.
///
/// L1 bounds the Hessian by its largest absolute row sum on that ball; the
/// only nonzero fourth derivative is f_xxxx = 2400.
class Rosenbrock2d final : public OracleFunction {
 public:
  static constexpr double kValidityRadius = 2.0;

  Rosenbrock2d() : OracleFunction(2, 6402.0, 2400.0, ValidityBall{Vector::Zero(2), kValidityRadius}) {}

  std::string name() const override { return "rosenbrock2d"; }

  double eval_value(const Vector& p) const override {
    const double x = p(0), y = p(1);
    return (1.0 - x) * (1.0 - x) + 100.0 * (y - x * x) * (y - x * x);
  }
  Vector eval_gradient(const Vector& p) const override {
    const double x = p(0), y = p(1);
    Vector g(2);
    g << -2.0 * (1.0 - x) - 400.0 * x * (y - x * x), 200.0 * (y - x * x);
    return g;
  }
  Matrix eval_hessian(const Vector& p) const override {
    const double x = p(0), y = p(1);
    Matrix h(2, 2);
    h << 2.0 - 400.0 * y + 1200.0 * x * x, -400.0 * x, -400.0 * x, 200.0;
    return h;
  }
  Matrix eval_third_contract(const Vector& p, const Vector& s) const override {
    // f_xxx = 2400 x, f_xxy = -400, all other third partials vanish.
    const double x = p(0);
    Matrix t(2, 2);
    t << 2400.0 * x * s(0) - 400.0 * s(1), -400.0 * s(0), -400.0 * s(0), 0.0;
    return t;
  }
};

/// Seeded quartic polynomial
///
///   b.x + x'Ax/2 + sum_m c_m (u_m.x)^3 / 6 + sum_m w_m (v_m.x)^4 / 24 + mu ||x||^4 / 24
///
/// with every coefficient uniform. The quartic part is positive definite so
/// the polynomial is bounded below. L3 and L1 are upper bounds from the
/// coefficient norms on the ball of radius 6.
class RandomQuartic final : public OracleFunction {
 public:
  static constexpr double kValidityRadius = 6.0;

  struct Coefficients {
    Vector b;
    Matrix A;
    std::vector<double> c;
    std::vector<Vector> u;
    std::vector<double> w;
    std::vector<Vector> v;
    double mu = 1.0;
  };

  RandomQuartic(std::uint64_t seed, int dim) : RandomQuartic(draw(seed, dim), seed) {}

  std::string name() const override { return "random_quartic"; }
  std::uint64_t seed() const { return seed_; }
  const Coefficients& coefficients() const { return k_; }

  double eval_value(const Vector& x) const override {
    double v = k_.b.dot(x) + 0.5 * x.dot(k_.A * x);
    for (std::size_t m = 0; m < k_.c.size(); ++m) v += k_.c[m] * std::pow(k_.u[m].dot(x), 3) / 6.0;
    for (std::size_t m = 0; m < k_.w.size(); ++m) v += k_.w[m] * std::pow(k_.v[m].dot(x), 4) / 24.0;
    return v + k_.mu * x.squaredNorm() * x.squaredNorm() / 24.0;
  }
  Vector eval_gradient(const Vector& x) const override {
    Vector g = k_.b + k_.A * x;
    for (std::size_t m = 0; m < k_.c.size(); ++m) g += 0.5 * k_.c[m] * std::pow(k_.u[m].dot(x), 2) * k_.u[m];
    for (std::size_t m = 0; m < k_.w.size(); ++m) g += k_.w[m] * std::pow(k_.v[m].dot(x), 3) / 6.0 * k_.v[m];
    return g + k_.mu / 6.0 * x.squaredNorm() * x;
  }
  Matrix eval_hessian(const Vector& x) const override {
    const int d = dim();
    Matrix h = k_.A;
    for (std::size_t m = 0; m < k_.c.size(); ++m) h += k_.c[m] * k_.u[m].dot(x) * k_.u[m] * k_.u[m].transpose();
    for (std::size_t m = 0; m < k_.w.size(); ++m)
      h += 0.5 * k_.w[m] * std::pow(k_.v[m].dot(x), 2) * k_.v[m] * k_.v[m].transpose();
    h += k_.mu / 6.0 * (x.squaredNorm() * Matrix::Identity(d, d) + 2.0 * x * x.transpose());
    return h;
  }
  Matrix eval_third_contract(const Vector& x, const Vector& s) const override {
    const int d = dim();
    Matrix t = Matrix::Zero(d, d);
    for (std::size_t m = 0; m < k_.c.size(); ++m) t += k_.c[m] * k_.u[m].dot(s) * k_.u[m] * k_.u[m].transpose();
    for (std::size_t m = 0; m < k_.w.size(); ++m)
      t += k_.w[m] * k_.v[m].dot(x) * k_.v[m].dot(s) * k_.v[m] * k_.v[m].transpose();
    t += k_.mu / 3.0 * (x.dot(s) * Matrix::Identity(d, d) + x * s.transpose() + s * x.transpose());
    return t;
  }

 private:
  RandomQuartic(Coefficients k, std::uint64_t seed)
      : OracleFunction(static_cast<int>(k.b.size()), lipschitz1(k), lipschitz3(k),
                       ValidityBall{Vector::Zero(k.b.size()), kValidityRadius}),
        k_(std::move(k)),
        seed_(seed) {}

  static Coefficients draw(std::uint64_t seed, int dim) {
    if (dim <= 0) throw ConfigurationError("random_quartic needs a positive dimension");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    auto vec = [&] {
      Vector v(dim);
      for (int i = 0; i < dim; ++i) v(i) = sym(rng);
      return v;
    };
    Coefficients k;
    k.b = vec();
    k.A = Matrix(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) k.A(i, j) = sym(rng);
    k.A = 0.5 * (k.A + k.A.transpose()).eval();
    for (int m = 0; m < dim; ++m) {
      k.c.push_back(sym(rng));
      k.u.push_back(vec());
    }
    for (int m = 0; m < dim; ++m) {
      k.w.push_back(pos(rng));
      k.v.push_back(vec());
    }
    k.mu = 0.5 + 0.5 * pos(rng);
    return k;
  }

  static double lipschitz3(const Coefficients& k) {
    double l = k.mu;
    for (std::size_t m = 0; m < k.w.size(); ++m) l += k.w[m] * std::pow(k.v[m].norm(), 4);
    return l;
  }

  static double lipschitz1(const Coefficients& k) {
    const double rho = kValidityRadius;
    double l = k.A.norm();
    for (std::size_t m = 0; m < k.c.size(); ++m) l += std::abs(k.c[m]) * std::pow(k.u[m].norm(), 3) * rho;
    l += 0.5 * lipschitz3(k) * rho * rho;
    return l;
  }

  Coefficients k_;
  std::uint64_t seed_;
};

/// 10 (1 + x^2)^(-1/10): bounded below by 0, infimum approached only as
/// |x| -> infinity, with a gradient that decays like 2 |x|^(-1.2).
/// Gradient descent needs on the order of eps^(-1.83) steps on it, which makes
/// it the benchmark for iteration-count scaling. The amplitude keeps the
/// largest gradient (about 0.94) above every eps in the usual sweep.
/// Constants are global: sup |f''| = |f''(0)| = 2 and sup |f| = f(0) = 13.2.
class SlowTail1d final : public OracleFunction {
 public:
  static constexpr double kExponent = 0.1;
  static constexpr double kAmplitude = 10.0;

  SlowTail1d() : OracleFunction(1, 2.0, 13.5, ValidityBall{}) {}

  std::string name() const override { return "slow_tail1d"; }

  double eval_value(const Vector& p) const override {
    return kAmplitude * std::pow(1.0 + p(0) * p(0), -kExponent);
  }
  Vector eval_gradient(const Vector& p) const override {
    const double x = p(0), u = 1.0 + x * x, b = kExponent;
    return Vector::Constant(1, kAmplitude * -2.0 * b * x * std::pow(u, -b - 1.0));
  }
  Matrix eval_hessian(const Vector& p) const override {
    const double x = p(0), u = 1.0 + x * x, b = kExponent;
    const double f2 = -2.0 * b * std::pow(u, -b - 1.0) + 4.0 * b * (b + 1.0) * x * x * std::pow(u, -b - 2.0);
    return Matrix::Constant(1, 1, kAmplitude * f2);
  }
  Matrix eval_third_contract(const Vector& p, const Vector& s) const override {
    const double x = p(0), u = 1.0 + x * x, b = kExponent;
    const double f3 = 12.0 * b * (b + 1.0) * x * std::pow(u, -b - 2.0) -
                      8.0 * b * (b + 1.0) * (b + 2.0) * x * x * x * std::pow(u, -b - 3.0);
    return Matrix::Constant(1, 1, kAmplitude * f3 * s(0));
  }
};

/// Names accepted by corpus_get.
inline const std::vector<std::string>& corpus_names() {
  static const std::vector<std::string> names = {"doublewell2d", "doublewell1d", "convex_quadratic",
                                                 "rosenbrock2d", "random_quartic", "slow_tail1d"};
  return names;
}

/// Problem registry. `seed` and `dim` only matter for random_quartic (dim also
/// sizes convex_quadratic).
inline std::unique_ptr<OracleFunction> corpus_get(std::string_view name, std::uint64_t seed = 0, int dim = 2) {
  if (name == "doublewell2d") return std::make_unique<DoubleWell>(2);
  if (name == "doublewell1d") return std::make_unique<DoubleWell>(1);
  if (name == "convex_quadratic") return std::make_unique<ConvexQuadratic>(dim);
  if (name == "rosenbrock2d") return std::make_unique<Rosenbrock2d>();
  if (name == "random_quartic") return std::make_unique<RandomQuartic>(seed, dim);
  if (name == "slow_tail1d") return std::make_unique<SlowTail1d>();
  throw UnknownProblem("unknown problem '" + std::string(name) + "'");
}

/// Conventional starting point for each corpus entry.
inline Vector default_start(std::string_view name, int dim) {
  if (name == "doublewell2d") return (Vector(2) << 0.2, 0.1).finished();
  if (name == "doublewell1d") return Vector::Constant(1, 0.2);
  if (name == "convex_quadratic") return Vector::Unit(dim, 0);
  if (name == "rosenbrock2d") return (Vector(2) << -1.2, 1.0).finished();
  if (name == "random_quartic") return Vector::Constant(dim, 0.5);
  if (name == "slow_tail1d") return Vector::Constant(1, 0.5);
  throw UnknownProblem("unknown problem '" + std::string(name) + "'");
}

}  // namespace guiltycut
