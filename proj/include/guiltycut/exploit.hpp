#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>

#include "guiltycut/oracle.hpp"

namespace guiltycut {

/// q(theta) = f(c + theta s) along a unit direction.
class LineRestriction {
 public:
  LineRestriction(const OracleFunction& f, Vector point, Vector direction)
      : f_(f), point_(std::move(point)), direction_(std::move(direction)) {
    if (std::abs(direction_.norm() - 1.0) > 1e-12) throw ConfigurationError("line direction must be a unit vector");
  }

  Vector at(double theta) const { return point_ + theta * direction_; }
  double value(double theta) const { return f_.value(at(theta)); }
  double first(double theta) const { return f_.gradient(at(theta)).dot(direction_); }
  double second(double theta) const { return direction_.dot(f_.hessian(at(theta)) * direction_); }

  const Vector& point() const { return point_; }
  const Vector& direction() const { return direction_; }

 private:
  const OracleFunction& f_;
  Vector point_;
  Vector direction_;
};

struct ExploitStep {
  Vector point;
  double theta = 0.0;
  double value = 0.0;
};

/// Four-point negative-curvature step: the best of q(12R), q(9R), q(-9R),
/// q(-12R), ties going to the earlier candidate.
inline ExploitStep exploit_nc_step(const OracleFunction& f, const Vector& c, const Vector& s, double R) {
  const LineRestriction q(f, c, s);
  const std::array<double, 4> thetas = {12.0 * R, 9.0 * R, -9.0 * R, -12.0 * R};
  ExploitStep best;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double v = q.value(thetas[i]);
    if (i == 0 || v < best.value) {
      best.value = v;
      best.theta = thetas[i];
    }
  }
  best.point = q.at(best.theta);
  return best;
}

inline Vector exploit_nc(const OracleFunction& f, const Vector& c, const Vector& s, double R) {
  return exploit_nc_step(f, c, s, R).point;
}

struct EigenPair {
  double lambda_min = 0.0;
  Vector direction;
};

/// Smallest eigenvalue of a symmetric matrix and a unit eigenvector.
inline EigenPair min_eigpair(const Matrix& H) {
  if (H.rows() != H.cols() || H.rows() == 0) throw ConfigurationError("min_eigpair needs a square matrix");
  const Matrix sym = 0.5 * (H + H.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw EigenFailure("symmetric eigensolver did not converge");
  Vector p = solver.eigenvectors().col(0);
  p.normalize();
  return {solver.eigenvalues()(0), p};
}

/// Whether s' ∇²f(c + R gamma s) s <= -21 L3 R^2.
inline bool check_curvature_witness(const OracleFunction& f, const Vector& c, const Vector& s, double gamma, double L3,
                                    double R) {
  if (std::abs(gamma) > 1.0) throw ConfigurationError("curvature witness needs |gamma| <= 1");
  return LineRestriction(f, c, s).second(R * gamma) <= -21.0 * L3 * R * R;
}

}  // namespace guiltycut
