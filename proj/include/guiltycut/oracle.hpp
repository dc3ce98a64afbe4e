#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "guiltycut/errors.hpp"

namespace guiltycut {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Snapshot of oracle usage. Each call increments only the counter of the
/// highest derivative order it requested.
struct EvalCounters {
  std::uint64_t n0 = 0;
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  std::uint64_t n3 = 0;
  std::uint64_t n_center = 0;

  friend EvalCounters operator-(const EvalCounters& a, const EvalCounters& b) {
    return {a.n0 - b.n0, a.n1 - b.n1, a.n2 - b.n2, a.n3 - b.n3, a.n_center - b.n_center};
  }
  friend bool operator==(const EvalCounters&, const EvalCounters&) = default;
};

/// Thread-safe counter storage shared by an oracle and any wrapper that
/// forwards to it.
class CounterBlock {
 public:
  enum Slot : int { kValue = 0, kGradient = 1, kHessian = 2, kThird = 3, kCenter = 4 };

  void bump(Slot slot) const { n_[slot].fetch_add(1, std::memory_order_relaxed); }

  EvalCounters snapshot() const {
    return {load(kValue), load(kGradient), load(kHessian), load(kThird), load(kCenter)};
  }

  void reset() const {
    for (auto& n : n_) n.store(0, std::memory_order_relaxed);
  }

 private:
  std::uint64_t load(Slot s) const { return n_[s].load(std::memory_order_relaxed); }
  mutable std::atomic<std::uint64_t> n_[5] = {};
};

/// Closed ball on which an oracle's Lipschitz constants are valid.
struct ValidityBall {
  Vector center;  // empty means "origin of the oracle's dimension"
  double radius = kUnbounded;

  bool unbounded() const { return std::isinf(radius); }

  /// True when ball(r, c) is contained in this ball.
  bool covers(const Vector& c, double r) const {
    if (unbounded()) return true;
    const double dist = center.size() == 0 ? c.norm() : (c - center).norm();
    return dist + r <= radius;
  }
};

/// Derivatives through order three at a point. `third[k]` is the third
/// derivative tensor contracted with the k-th basis vector.
struct TaylorData3 {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
  std::vector<Matrix> third;
};

/// Evaluation interface for a smooth function f : R^d -> R.
///
/// The counted entry points (value, gradient, ...) are what the solvers use;
/// the virtual eval_* hooks are uncounted and exist for implementers and for
/// instrumentation that must not perturb the oracle-call accounting.
class OracleFunction {
 public:
  OracleFunction(int dim, double lipschitz_g1, double lipschitz_g3, ValidityBall validity,
                 std::shared_ptr<const CounterBlock> counters = nullptr)
      : dim_(dim),
        lipschitz_g1_(lipschitz_g1),
        lipschitz_g3_(lipschitz_g3),
        validity_(std::move(validity)),
        counters_(counters ? std::move(counters) : std::make_shared<const CounterBlock>()) {
    if (dim_ <= 0) throw ConfigurationError("oracle dimension must be positive");
    if (validity_.center.size() == 0) validity_.center = Vector::Zero(dim_);
  }
  virtual ~OracleFunction() = default;

  OracleFunction(const OracleFunction&) = delete;
  OracleFunction& operator=(const OracleFunction&) = delete;

  int dim() const { return dim_; }
  double lipschitz_g1() const { return lipschitz_g1_; }
  double lipschitz_g3() const { return lipschitz_g3_; }
  const ValidityBall& validity() const { return validity_; }
  virtual std::string name() const { return "anonymous"; }

  double value(const Vector& x) const {
    counters_->bump(CounterBlock::kValue);
    return eval_value(x);
  }
  Vector gradient(const Vector& x) const {
    counters_->bump(CounterBlock::kGradient);
    return eval_gradient(x);
  }
  Matrix hessian(const Vector& x) const {
    counters_->bump(CounterBlock::kHessian);
    return eval_hessian(x);
  }
  Matrix third_contract(const Vector& x, const Vector& s) const {
    counters_->bump(CounterBlock::kThird);
    return eval_third_contract(x, s);
  }
  /// All derivatives through order three in a single order-3 request.
  TaylorData3 taylor3(const Vector& x) const {
    counters_->bump(CounterBlock::kThird);
    return eval_taylor3(x);
  }

  void note_center_call() const { counters_->bump(CounterBlock::kCenter); }
  EvalCounters counters() const { return counters_->snapshot(); }
  void reset_counters() const { counters_->reset(); }
  const std::shared_ptr<const CounterBlock>& counter_block() const { return counters_; }

  virtual double eval_value(const Vector& x) const = 0;
  virtual Vector eval_gradient(const Vector& x) const = 0;
  virtual Matrix eval_hessian(const Vector& x) const = 0;
  virtual Matrix eval_third_contract(const Vector& x, const Vector& s) const = 0;

  virtual TaylorData3 eval_taylor3(const Vector& x) const {
    TaylorData3 out;
    out.value = eval_value(x);
    out.gradient = eval_gradient(x);
    out.hessian = eval_hessian(x);
    out.third.reserve(dim_);
    for (int k = 0; k < dim_; ++k) out.third.push_back(eval_third_contract(x, Vector::Unit(dim_, k)));
    return out;
  }

 private:
  int dim_;
  double lipschitz_g1_;
  double lipschitz_g3_;
  ValidityBall validity_;
  std::shared_ptr<const CounterBlock> counters_;
};

/// f̂(x) = f(x) + (alpha/2) ||z - x||^2.
///
/// Shares the base oracle's counters, so every evaluation of f̂ is accounted
/// as an evaluation of f.
class ProxFunction final : public OracleFunction {
 public:
  ProxFunction(const OracleFunction& base, Vector anchor, double alpha)
      : OracleFunction(base.dim(), base.lipschitz_g1() + alpha, base.lipschitz_g3(), base.validity(),
                       base.counter_block()),
        base_(base),
        anchor_(std::move(anchor)),
        alpha_(alpha) {
    if (anchor_.size() != base.dim()) throw ConfigurationError("prox anchor has wrong dimension");
  }

  std::string name() const override { return "prox(" + base_.name() + ")"; }
  const OracleFunction& base() const { return base_; }
  const Vector& anchor() const { return anchor_; }
  double alpha() const { return alpha_; }

  double eval_value(const Vector& x) const override {
    return base_.eval_value(x) + 0.5 * alpha_ * (anchor_ - x).squaredNorm();
  }
  Vector eval_gradient(const Vector& x) const override {
    return base_.eval_gradient(x) + alpha_ * (x - anchor_);
  }
  Matrix eval_hessian(const Vector& x) const override {
    Matrix h = base_.eval_hessian(x);
    h.diagonal().array() += alpha_;
    return h;
  }
  Matrix eval_third_contract(const Vector& x, const Vector& s) const override {
    return base_.eval_third_contract(x, s);
  }

 private:
  const OracleFunction& base_;
  Vector anchor_;
  double alpha_;
};

/// Worst relative deviation between analytic derivatives and central
/// differences of the next-lower order.
struct FiniteDifferenceReport {
  double gradient_error = 0.0;
  double hessian_error = 0.0;
  double third_error = 0.0;
  double hessian_asymmetry = 0.0;
  double third_asymmetry = 0.0;
  double step = 0.0;
  bool passed = false;

  double max_error() const { return std::max({gradient_error, hessian_error, third_error}); }
};

namespace detail {

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NonFiniteEvaluation(std::string("non-finite ") + what);
}
inline void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
  if (!m.allFinite()) throw NonFiniteEvaluation(std::string("non-finite ") + what);
}

inline double relative_error(const Matrix& approx, const Matrix& exact) {
  const double scale = std::max(1.0, exact.cwiseAbs().maxCoeff());
  return (approx - exact).cwiseAbs().maxCoeff() / scale;
}

}  // namespace detail

/// Central-difference audit of every derivative order an oracle exposes.
/// Uses the uncounted evaluators so the audit does not disturb accounting.
inline FiniteDifferenceReport finite_difference_check(const OracleFunction& f, const Vector& x,
                                                      double rel_tol = 1e-5) {
  const int d = f.dim();
  const double h = 1e-4 * std::max(1.0, x.norm());
  FiniteDifferenceReport rep;
  rep.step = h;

  const Vector g = f.eval_gradient(x);
  const Matrix H = f.eval_hessian(x);
  detail::require_finite(f.eval_value(x), "value");
  detail::require_finite(g, "gradient");
  detail::require_finite(H, "hessian");

  Vector g_fd(d);
  Matrix H_fd(d, d);
  for (int i = 0; i < d; ++i) {
    const Vector e = Vector::Unit(d, i);
    const double fp = f.eval_value(x + h * e);
    const double fm = f.eval_value(x - h * e);
    detail::require_finite(fp, "value");
    detail::require_finite(fm, "value");
    g_fd(i) = (fp - fm) / (2.0 * h);

    const Vector gp = f.eval_gradient(x + h * e);
    const Vector gm = f.eval_gradient(x - h * e);
    detail::require_finite(gp, "gradient");
    detail::require_finite(gm, "gradient");
    H_fd.col(i) = (gp - gm) / (2.0 * h);

    const Matrix T = f.eval_third_contract(x, e);
    detail::require_finite(T, "third derivative");
    const Matrix Hp = f.eval_hessian(x + h * e);
    const Matrix Hm = f.eval_hessian(x - h * e);
    rep.third_error = std::max(rep.third_error, detail::relative_error((Hp - Hm) / (2.0 * h), T));
    rep.third_asymmetry = std::max(rep.third_asymmetry, (T - T.transpose()).cwiseAbs().maxCoeff());
  }
  rep.gradient_error = detail::relative_error(g_fd, g);
  rep.hessian_error = detail::relative_error(H_fd, H);
  rep.hessian_asymmetry = (H - H.transpose()).cwiseAbs().maxCoeff();
  rep.passed = rep.max_error() <= rel_tol && rep.hessian_asymmetry <= 1e-12 && rep.third_asymmetry <= 1e-12;
  return rep;
}

}  // namespace guiltycut
