#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "guiltycut/cutting.hpp"
#include "guiltycut/exploit.hpp"
#include "guiltycut/oracle.hpp"
#include "guiltycut/region.hpp"

namespace guiltycut {

enum class TrustRegionStatus { SecondOrderStationary, FirstOrderStationary, Progress };

enum class Branch { grad_small_curv_ok, grad_small_curv_bad, prox_stationary, escaped_ball, nonconvex_pair };

inline const char* to_string(TrustRegionStatus s) {
  switch (s) {
    case TrustRegionStatus::SecondOrderStationary:
      return "second_order_stationary";
    case TrustRegionStatus::FirstOrderStationary:
      return "first_order_stationary";
    case TrustRegionStatus::Progress:
      return "progress";
  }
  return "?";
}

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::grad_small_curv_ok:
      return "grad_small_curv_ok";
    case Branch::grad_small_curv_bad:
      return "grad_small_curv_bad";
    case Branch::prox_stationary:
      return "prox_stationary";
    case Branch::escaped_ball:
      return "escaped_ball";
    case Branch::nonconvex_pair:
      return "nonconvex_pair";
  }
  return "?";
}

struct TrustRegionOptions {
  CenterOracle center = CenterOracle::analytic();
  /// Return as soon as the gradient is small, skipping the Hessian test.
  bool first_order = false;
  /// Multiplies alpha. Only the validation mutation sentinels change it.
  double alpha_scale = 1.0;
  /// Raise ProgressAssertionFailed when a Progress step under-delivers.
  bool assert_progress = true;
  /// Replaces the center oracle in the cutting loop when set (tau still
  /// sizes the cut budget).
  CenterRule center_rule;
};

struct TrustRegionOutcome {
  Vector z_plus;
  int K = 0;
  TrustRegionStatus status = TrustRegionStatus::Progress;
  Branch branch = Branch::prox_stationary;
  double alpha = 0.0;
  double decrease = 0.0;          // f(z) - f(z+)
  double required_decrease = 0.0;  // min{10 L3 R^4, eps^2 / (168 R^2 L3)}
  double f_z = 0.0;
  double f_plus = 0.0;
  double grad_norm_u = 0.0;
  std::optional<double> lambda_min;  // of ∇²f(u), when the Hessian was examined
  int cuts_budget = 0;
  int cuts_made = 0;
  CertificateCase certificate = CertificateCase::StationaryOfProx;
  bool empty_interior = false;
  // line searched by the negative-curvature step, when one was taken
  std::optional<Vector> exploit_center;
  std::optional<Vector> exploit_direction;
};

/// Guaranteed decrease of a non-terminal trust-region step.
inline double progress_bound(double eps, double L3, double R) {
  return std::min(10.0 * L3 * std::pow(R, 4), eps * eps / (168.0 * R * R * L3));
}

/// Number of cuts: ceil((d / tau) log(8 L̂1 R / ε̂)), at least one.
inline int cut_budget(int d, double tau, double Lhat1, double R, double epshat) {
  const double n = d / tau * std::log(8.0 * Lhat1 * R / epshat);
  return std::max(1, static_cast<int>(std::ceil(n)));
}

/// Roughly minimizes f over ball(R, z) with cutting planes on the proximal
/// function, exploiting any nonconvexity the certificate exposes.
inline TrustRegionOutcome cutting_trust_region(const OracleFunction& f, const Vector& z, double eps, double L1,
                                               double L3, double R, const TrustRegionOptions& opts, Rng& rng) {
  if (!(eps > 0.0) || !(L1 > 0.0) || !(L3 > 0.0) || !(R > 0.0))
    throw ConfigurationError("trust region needs positive eps, L1, L3 and R");
  opts.center.validate();

  TrustRegionOutcome out;
  out.alpha = opts.alpha_scale * 21.0 * L3 * R * R;
  const ProxFunction fhat(f, z, out.alpha);
  const double epshat = eps / 2.0;
  const double Lhat1 = L1 + out.alpha;
  out.cuts_budget = cut_budget(f.dim(), opts.center.tau, Lhat1, R, epshat);

  const CuttingRun run = opts.center_rule
                             ? cutting_plane_method(fhat, z, out.cuts_budget, R, opts.center_rule)
                             : cutting_plane_method(fhat, z, out.cuts_budget, R, opts.center, rng);
  out.cuts_made = static_cast<int>(run.region.num_cuts());
  out.empty_interior = run.empty_interior_at.has_value();
  const CertificateOutcome cert = nonconvexity_certificate(fhat, run, Lhat1, epshat, R, rng);
  out.K = cert.K;
  out.certificate = cert.kind;
  out.required_decrease = progress_bound(eps, L3, R);
  out.f_z = f.value(z);

  const Vector& u = cert.u;
  const Vector grad_u = f.gradient(u);
  out.grad_norm_u = grad_u.norm();

  if (out.grad_norm_u <= eps) {
    if (opts.first_order) {
      out.status = TrustRegionStatus::FirstOrderStationary;
      out.branch = Branch::grad_small_curv_ok;
      out.z_plus = u;
      out.f_plus = f.value(u);
      out.decrease = out.f_z - out.f_plus;
      return out;
    }
    const Matrix H = f.hessian(u);
    const EigenPair eig = min_eigpair(H);
    out.lambda_min = eig.lambda_min;
    if (eig.direction.dot(H * eig.direction) >= -out.alpha) {
      out.status = TrustRegionStatus::SecondOrderStationary;
      out.branch = Branch::grad_small_curv_ok;
      out.z_plus = u;
      out.f_plus = f.value(u);
      out.decrease = out.f_z - out.f_plus;
      return out;
    }
    const ExploitStep step = exploit_nc_step(f, u, eig.direction, R);
    out.exploit_center = u;
    out.exploit_direction = eig.direction;
    out.branch = Branch::grad_small_curv_bad;
    out.z_plus = step.point;
    out.f_plus = step.value;
  } else if (!cert.v) {
    out.branch = cert.kind == CertificateCase::EscapedBall ? Branch::escaped_ball : Branch::prox_stationary;
    out.z_plus = u;
    out.f_plus = f.value(u);
  } else {
    const Vector& v = *cert.v;
    const Vector s = (v - u) / (u - v).norm();
    const ExploitStep step = exploit_nc_step(f, 0.5 * (u + v), s, R);
    out.exploit_center = 0.5 * (u + v);
    out.exploit_direction = s;
    out.branch = Branch::nonconvex_pair;
    out.z_plus = step.point;
    out.f_plus = step.value;
  }

  out.status = TrustRegionStatus::Progress;
  out.decrease = out.f_z - out.f_plus;
  if (opts.assert_progress && out.decrease < out.required_decrease - 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "trust-region step decreased f by " << out.decrease << " < guaranteed " << out.required_decrease
        << " (branch " << to_string(out.branch) << "); Lipschitz constants too small for this problem?";
    throw ProgressAssertionFailed(msg.str());
  }
  return out;
}

}  // namespace guiltycut
