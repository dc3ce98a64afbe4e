#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "guiltycut/errors.hpp"
#include "guiltycut/oracle.hpp"

namespace guiltycut {

using Rng = std::mt19937_64;

/// Halfspace {x : normal . (x - anchor) <= 0}.
struct Cut {
  Vector anchor;
  Vector normal;
};

/// Ball(R, center0) intersected with an ordered list of halfspaces.
///
/// Internally each cut is also kept in unit-normal form ĝ.x <= b̂, which is
/// what membership, chords and the barrier use.
class LocalizationSet {
 public:
  LocalizationSet(Vector center0, double radius)
      : center0_(std::move(center0)), radius_(radius), G_(0, center0_.size()), b_(0) {
    if (!(radius_ > 0.0)) throw ConfigurationError("localization radius must be positive");
  }

  int dim() const { return static_cast<int>(center0_.size()); }
  const Vector& center0() const { return center0_; }
  double radius() const { return radius_; }
  const std::vector<Cut>& cuts() const { return cuts_; }
  std::size_t num_cuts() const { return cuts_.size(); }

  /// Appends a cut in place. Throws ZeroNormalCut for a vanishing normal.
  void push_cut(const Vector& anchor, const Vector& normal) {
    if (!anchor.allFinite() || !normal.allFinite()) throw NonFiniteEvaluation("non-finite cut");
    const double n = normal.norm();
    if (n == 0.0) throw ZeroNormalCut("zero normal: anchor is a stationary point");
    cuts_.push_back({anchor, normal});
    unit_.push_back(normal / n);
    offset_.push_back(unit_.back().dot(anchor));
    const Eigen::Index m = static_cast<Eigen::Index>(cuts_.size());
    G_.conservativeResize(m, dim());
    G_.row(m - 1) = unit_.back().transpose();
    b_.conservativeResize(m);
    b_(m - 1) = offset_.back();
  }

  [[nodiscard]] LocalizationSet with_cut(const Vector& anchor, const Vector& normal) const {
    LocalizationSet next = *this;
    next.push_cut(anchor, normal);
    return next;
  }

  /// Signed distance-like slack of cut t at x (positive = strictly inside).
  double cut_slack(std::size_t t, const Vector& x) const { return offset_[t] - unit_[t].dot(x); }
  double ball_slack(const Vector& x) const { return radius_ - (x - center0_).norm(); }

  bool contains(const Vector& x) const {
    if ((x - center0_).norm() > radius_) return false;
    for (std::size_t t = 0; t < cuts_.size(); ++t)
      if (cuts_[t].normal.dot(x - cuts_[t].anchor) > 0.0) return false;
    return true;
  }

  bool contains_strictly(const Vector& x) const {
    if (!(ball_slack(x) > 0.0)) return false;
    return cuts_.empty() || (slacks(x).array() > 0.0).all();
  }

  /// Smallest slack over all constraints, in distance units.
  double min_slack(const Vector& x) const {
    double s = ball_slack(x);
    for (std::size_t t = 0; t < cuts_.size(); ++t) s = std::min(s, cut_slack(t, x));
    return s;
  }

  /// Parameter interval {t : x + t*dir in S} for a point x in S. Empty
  /// intervals come back with lo > hi.
  std::pair<double, double> chord(const Vector& x, const Vector& dir) const {
    const Vector rel = x - center0_;
    const double a = dir.squaredNorm();
    const double b = rel.dot(dir);
    const double c = rel.squaredNorm() - radius_ * radius_;
    const double disc = b * b - a * c;
    if (disc < 0.0) return {1.0, -1.0};
    const double root = std::sqrt(disc);
    double lo = (-b - root) / a;
    double hi = (-b + root) / a;
    for (std::size_t t = 0; t < unit_.size(); ++t) {
      const double rate = unit_[t].dot(dir);
      const double slack = cut_slack(t, x);
      if (rate > 0.0)
        hi = std::min(hi, slack / rate);
      else if (rate < 0.0)
        lo = std::max(lo, slack / rate);
    }
    return {lo, hi};
  }

  const std::vector<Vector>& unit_normals() const { return unit_; }
  const std::vector<double>& offsets() const { return offset_; }
  /// Unit normals stacked row-wise and the matching offsets.
  const Matrix& normal_matrix() const { return G_; }
  const Vector& offset_vector() const { return b_; }
  /// All cut slacks at x at once.
  Vector slacks(const Vector& x) const { return b_ - G_ * x; }

 private:
  Vector center0_;
  double radius_;
  std::vector<Cut> cuts_;
  std::vector<Vector> unit_;
  std::vector<double> offset_;
  Matrix G_ = Matrix(0, 0);
  Vector b_ = Vector(0);
};

/// Functional form of LocalizationSet::push_cut.
[[nodiscard]] inline LocalizationSet add_cut(const LocalizationSet& s, const Vector& anchor, const Vector& normal) {
  return s.with_cut(anchor, normal);
}

inline Vector standard_normal(int d, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = n01(rng);
  return v;
}

inline Vector random_unit_vector(int d, Rng& rng) {
  Vector v = standard_normal(d, rng);
  while (v.norm() == 0.0) v = standard_normal(d, rng);
  return v / v.norm();
}

/// Uniform sample from ball(r, y): gaussian direction times r U^(1/d).
inline Vector sample_uniform_ball(const Vector& y, double r, Rng& rng) {
  if (r == 0.0) return y;
  const int d = static_cast<int>(y.size());
  const Vector dir = random_unit_vector(d, rng);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double rho = r * std::pow(u01(rng), 1.0 / d);
  return y + rho * dir;
}

/// One hit-and-run move from a point of S. Returns the new point and the
/// chord endpoints it was drawn from.
struct HitAndRunStep {
  Vector point;
  Vector chord_lo;
  Vector chord_hi;
};

inline HitAndRunStep hit_and_run_step(const LocalizationSet& s, const Vector& x, Rng& rng) {
  const Vector dir = random_unit_vector(s.dim(), rng);
  auto [lo, hi] = s.chord(x, dir);
  if (!(hi > lo)) throw EmptyInteriorSuspected("hit-and-run found no feasible chord");
  std::uniform_real_distribution<double> u(lo, hi);
  return {x + u(rng) * dir, x + lo * dir, x + hi * dir};
}

enum class CenterKind { analytic, sampled_centroid };

/// A concrete Centre routine plus its declared volume-reduction factor tau.
struct CenterOracle {
  CenterKind kind = CenterKind::analytic;
  double tau = 0.15;
  // analytic center
  double newton_tolerance = 1e-8;
  int newton_max_iterations = 200;
  // sampled centroid
  int samples = 64;
  int walk_steps_per_dim = 8;

  static CenterOracle analytic() { return {}; }
  static CenterOracle sampled_centroid() {
    CenterOracle c;
    c.kind = CenterKind::sampled_centroid;
    c.tau = 0.25;
    return c;
  }

  void validate() const {
    if (!(tau > 0.0 && tau <= 0.5)) throw ConfigurationError("center tau must lie in (0, 1/2]");
  }
};

namespace detail {

// Barrier  -sum log(b̂_t - ĝ_t.x) - log(R^2 - ||x - c||^2)  and derivatives.
struct BarrierEval {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

inline BarrierEval barrier(const LocalizationSet& s, const Vector& x) {
  const int d = s.dim();
  BarrierEval e;
  const Vector slack = s.slacks(x);
  const Vector inv = slack.cwiseInverse();
  e.value = -slack.array().log().sum();
  e.gradient = s.normal_matrix().transpose() * inv;
  e.hessian = s.normal_matrix().transpose() * inv.cwiseAbs2().asDiagonal() * s.normal_matrix();
  const Vector rel = x - s.center0();
  const double ball = s.radius() * s.radius() - rel.squaredNorm();
  e.value -= std::log(ball);
  e.gradient += 2.0 * rel / ball;
  e.hessian.diagonal().array() += 2.0 / ball;
  e.hessian.noalias() += (4.0 / (ball * ball)) * rel * rel.transpose();
  return e;
}

inline double barrier_value(const LocalizationSet& s, const Vector& x) {
  const double ball = s.radius() * s.radius() - (x - s.center0()).squaredNorm();
  return -s.slacks(x).array().log().sum() - std::log(ball);
}

inline bool barrier_domain(const LocalizationSet& s, const Vector& x) {
  return s.contains_strictly(x) && (x - s.center0()).squaredNorm() < s.radius() * s.radius();
}

// Cheap recovery for the common case: x sits on (or just outside) a few cuts
// and strictly inside the rest. Push it off the offending cuts by half the
// distance to the nearest satisfied constraint.
inline bool push_inside(const LocalizationSet& s, Vector& x) {
  Vector dir = Vector::Zero(s.dim());
  double room = s.ball_slack(x);
  if (!(room > 0.0)) return false;
  for (std::size_t t = 0; t < s.num_cuts(); ++t) {
    const double slack = s.cut_slack(t, x);
    if (slack <= 0.0)
      dir -= s.unit_normals()[t];
    else
      room = std::min(room, slack);
  }
  if (dir.norm() == 0.0) return s.contains_strictly(x);
  dir.normalize();
  for (double step = 0.5 * room; step > 1e-300; step *= 0.5) {
    const Vector cand = x + step * dir;
    if (s.contains_strictly(cand)) {
      x = cand;
      return true;
    }
  }
  return false;
}

// General phase-1: relaxed projections onto the most violated constraint,
// each shifted inward by a margin that shrinks geometrically.
inline bool project_inside(const LocalizationSet& s, Vector& x) {
  const Vector& c = s.center0();
  const double R = s.radius();
  for (double margin = 1e-2 * R; margin >= 1e-13 * R; margin *= 0.1) {
    Vector y = x;
    double best = -std::numeric_limits<double>::infinity();
    int since_best = 0;
    const int patience = 2 * (static_cast<int>(s.num_cuts()) + 1);
    for (int it = 0; it < 500; ++it) {
      if (s.contains_strictly(y)) {
        x = y;
        return true;
      }
      // most violated (or tightest) constraint in distance units
      double worst = s.ball_slack(y) - margin;
      int which = -1;
      for (std::size_t t = 0; t < s.num_cuts(); ++t) {
        const double v = s.cut_slack(t, y) - margin;
        if (v < worst) {
          worst = v;
          which = static_cast<int>(t);
        }
      }
      if (worst >= 0.0) break;
      // oscillating between constraints: the margin is wider than the region
      if (worst > best) {
        best = worst;
        since_best = 0;
      } else if (++since_best > patience) {
        break;
      }
      Vector next;
      if (which < 0) {
        const Vector rel = y - c;
        const double n = rel.norm();
        next = n > 0.0 ? Vector(c + rel * ((R - margin) / n)) : c;
      } else {
        next = y + worst * s.unit_normals()[which];
      }
      if (next == y) break;  // stuck at rounding level
      y = std::move(next);
    }
    if (s.contains_strictly(y)) {
      x = y;
      return true;
    }
  }
  return false;
}

inline Vector strictly_feasible_start(const LocalizationSet& s, const Vector& warm) {
  Vector x = warm;
  if (s.contains_strictly(x)) return x;
  if (push_inside(s, x)) return x;
  x = warm;
  if (project_inside(s, x)) return x;
  x = s.center0();
  if (project_inside(s, x)) return x;
  throw EmptyInteriorSuspected("could not find a strictly feasible point");
}

inline Vector analytic_center(const LocalizationSet& s, const Vector& warm, const CenterOracle& oc) {
  Vector x = strictly_feasible_start(s, warm);
  for (int it = 0; it < oc.newton_max_iterations; ++it) {
    const BarrierEval e = barrier(s, x);
    if (e.gradient.norm() <= oc.newton_tolerance) break;
    const Eigen::LDLT<Matrix> ldlt(e.hessian);
    const Vector step = -ldlt.solve(e.gradient);
    if (!step.allFinite()) break;
    const double decrement = std::sqrt(std::max(0.0, -e.gradient.dot(step)));
    if (decrement <= oc.newton_tolerance) break;
    // damped Newton: 1/(1+lambda) keeps a self-concordant barrier in domain
    double t = decrement > 0.25 ? 1.0 / (1.0 + decrement) : 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      const Vector cand = x + t * step;
      if (cand == x) break;  // step below rounding: x is as central as it gets
      if (!barrier_domain(s, cand)) continue;
      if (barrier_value(s, cand) <= e.value + 0.25 * t * e.gradient.dot(step)) {
        x = cand;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (!s.contains_strictly(x)) throw EmptyInteriorSuspected("analytic center left the region");
  return x;
}

inline Vector sampled_centroid(const LocalizationSet& s, const Vector& warm, const CenterOracle& oc, Rng& rng) {
  Vector x = strictly_feasible_start(s, warm);
  Vector sum = Vector::Zero(s.dim());
  const int steps = oc.walk_steps_per_dim * s.dim();
  Vector last = x;
  for (int m = 0; m < oc.samples; ++m) {
    for (int k = 0; k < steps; ++k) {
      HitAndRunStep st = hit_and_run_step(s, x, rng);
      if (s.contains_strictly(st.point)) x = std::move(st.point);
    }
    sum += x;
    last = x;
  }
  Vector mean = sum / oc.samples;
  if (s.contains_strictly(mean)) return mean;
  if (s.contains_strictly(last)) return last;
  throw EmptyInteriorSuspected("centroid estimate is not strictly feasible");
}

}  // namespace detail

/// Centre(S): a strictly feasible point of S chosen by the given oracle.
inline Vector center(const LocalizationSet& s, const CenterOracle& oracle, const Vector& warm_start, Rng& rng) {
  oracle.validate();
  switch (oracle.kind) {
    case CenterKind::analytic:
      return detail::analytic_center(s, warm_start, oracle);
    case CenterKind::sampled_centroid:
      return detail::sampled_centroid(s, warm_start, oracle, rng);
  }
  throw ConfigurationError("unknown center kind");
}

inline double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

struct VolumeEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo volume of S by rejection from its bounding ball (d <= 3).
inline VolumeEstimate estimate_volume_mc(const LocalizationSet& s, int n_samples, Rng& rng) {
  if (s.dim() > 3) throw DimensionTooLarge("volume estimation is limited to d <= 3");
  if (n_samples <= 0) throw ConfigurationError("need a positive sample count");
  const double ball = unit_ball_volume(s.dim()) * std::pow(s.radius(), s.dim());
  long hits = 0;
  for (int i = 0; i < n_samples; ++i)
    if (s.contains(sample_uniform_ball(s.center0(), s.radius(), rng))) ++hits;
  const double p = static_cast<double>(hits) / n_samples;
  return {ball * p, ball * std::sqrt(p * (1.0 - p) / n_samples)};
}

}  // namespace guiltycut
