#pragma once

#include <memory>
#include <string>
#include <utility>

#include "guiltycut/oracle.hpp"

namespace guiltycut {

/// Third-order Taylor expansion of f at z plus the quartic penalty
/// (L3 / 12) ||x - z||^4, an upper bound on f wherever L3 is valid.
///
/// Built from a single order-3 request on f; evaluating the model never
/// touches f again. The model's own constants are (2 L1, 2 L3) on
/// ball(validity_radius, z).
class Taylor3Model final : public OracleFunction {
 public:
  Taylor3Model(const OracleFunction& f, Vector z, double validity_radius)
      : OracleFunction(f.dim(), 2.0 * f.lipschitz_g1(), 2.0 * f.lipschitz_g3(), ValidityBall{z, validity_radius}),
        z_(std::move(z)),
        data_(f.taylor3(z_)),
        penalty_(f.lipschitz_g3() / 12.0),
        base_name_(f.name()) {}

  std::string name() const override { return "taylor3(" + base_name_ + ")"; }
  const Vector& expansion_point() const { return z_; }
  const TaylorData3& taylor_data() const { return data_; }

  double eval_value(const Vector& x) const override {
    const Vector h = x - z_;
    const double hh = h.squaredNorm();
    return data_.value + data_.gradient.dot(h) + 0.5 * h.dot(data_.hessian * h) +
           h.dot(contract_twice(h)) / 6.0 + penalty_ * hh * hh;
  }

  Vector eval_gradient(const Vector& x) const override {
    const Vector h = x - z_;
    return data_.gradient + data_.hessian * h + 0.5 * contract_twice(h) + 4.0 * penalty_ * h.squaredNorm() * h;
  }

  Matrix eval_hessian(const Vector& x) const override {
    const Vector h = x - z_;
    const int d = dim();
    return data_.hessian + contract_once(h) +
           4.0 * penalty_ * (h.squaredNorm() * Matrix::Identity(d, d) + 2.0 * h * h.transpose());
  }

  Matrix eval_third_contract(const Vector& x, const Vector& s) const override {
    const Vector h = x - z_;
    const int d = dim();
    return contract_once(s) +
           8.0 * penalty_ * (h.dot(s) * Matrix::Identity(d, d) + s * h.transpose() + h * s.transpose());
  }

 private:
  // T[h] = sum_k h_k T[e_k]
  Matrix contract_once(const Vector& h) const {
    Matrix m = Matrix::Zero(dim(), dim());
    for (int k = 0; k < dim(); ++k) m += h(k) * data_.third[k];
    return m;
  }
  // T[h, h] as a vector
  Vector contract_twice(const Vector& h) const { return contract_once(h) * h; }

  Vector z_;
  TaylorData3 data_;
  double penalty_;
  std::string base_name_;
};

inline std::unique_ptr<Taylor3Model> taylor3_model(const OracleFunction& f, const Vector& z,
                                                   double validity_radius = kUnbounded) {
  return std::make_unique<Taylor3Model>(f, z, validity_radius);
}

}  // namespace guiltycut
