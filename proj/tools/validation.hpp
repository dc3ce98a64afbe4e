#pragma once

// Property suites behind `guiltycut validate` and the acceptance binary.
// Every suite recomputes the quantities it checks from raw oracle values
// (uncounted eval_* calls) instead of trusting the flags in the reports.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "scripted_doublewell.hpp"
#include "guiltycut/corpus.hpp"
#include "guiltycut/cutting.hpp"
#include "guiltycut/drivers.hpp"
#include "guiltycut/exploit.hpp"
#include "guiltycut/region.hpp"
#include "guiltycut/scaling.hpp"
#include "guiltycut/taylor_model.hpp"
#include "guiltycut/trust_region.hpp"

namespace guiltycut::validation {

struct SuiteResult {
  std::string name;
  bool passed = true;
  int checks = 0;
  int failures = 0;
  std::vector<std::string> details;  // failures first-hand, then notes
  double seconds = 0.0;
};

struct ValidationOptions {
  std::uint64_t seed = 20240607;
  /// Forwarded to every trust-region call. Anything but 1 is a deliberate
  /// mutation and should make the progress suite fail.
  double alpha_scale = 1.0;
};

namespace detail {

class Recorder {
 public:
  explicit Recorder(SuiteResult& r) : r_(r) {}
  bool check(bool ok, const std::string& what) {
    ++r_.checks;
    if (!ok) {
      ++r_.failures;
      r_.passed = false;
      if (r_.failures <= 20) r_.details.push_back("FAIL " + what);
    }
    return ok;
  }
  void note(const std::string& s) { r_.details.push_back(s); }

 private:
  SuiteResult& r_;
};

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// The corpus entries the fuzzers draw from, each with a dimension.
struct FuzzProblem {
  std::string name;
  std::uint64_t seed;
  int dim;
};

inline FuzzProblem fuzz_problem(int i) {
  static const std::vector<std::string> names = {"doublewell2d",   "doublewell1d",  "convex_quadratic",
                                                 "rosenbrock2d",   "random_quartic", "slow_tail1d"};
  const std::string& n = names[static_cast<std::size_t>(i) % names.size()];
  const int dim = n == "random_quartic" ? 2 + (i / 6) % 2 : 2;
  return {n, static_cast<std::uint64_t>(i), dim};
}

/// A point whose ball of radius `margin` stays inside the validity ball of f.
/// Unbounded problems draw around their default start.
inline Vector random_start(const OracleFunction& f, const std::string& name, double margin, double spread,
                           Rng& rng) {
  const ValidityBall& vb = f.validity();
  if (vb.unbounded()) return default_start(name, f.dim()) + sample_uniform_ball(Vector::Zero(f.dim()), spread, rng);
  const double room = vb.radius - margin;
  if (!(room > 0.0)) throw ConfigurationError("validity ball too small for the requested margin");
  return sample_uniform_ball(vb.center, std::min(room, spread), rng);
}

inline double guarded_radius(double eps, double L3) { return std::pow(L3, -1.0 / 3.0) * std::cbrt(eps) / 3.0; }

// Smallest q''(R gamma) over a grid of gamma in [-1, 1].
inline double min_curvature_on_segment(const OracleFunction& f, const Vector& c, const Vector& s, double R) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 200; ++k) {
    const double g = -1.0 + k / 100.0;
    const Vector x = c + R * g * s;
    best = std::min(best, s.dot(f.eval_hessian(x) * s));
  }
  return best;
}

template <class Body>
SuiteResult run_suite(const std::string& name, Body&& body) {
  SuiteResult r;
  r.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  Recorder rec(r);
  try {
    body(rec);
  } catch (const std::exception& e) {
    rec.check(false, std::string("suite aborted: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace detail

/// Per-iteration guaranteed decrease over 100 seeded trust-region calls, plus
/// the stronger branch-specific bounds where they apply.
inline SuiteResult suite_progress(const ValidationOptions& opt = {}) {
  return detail::run_suite("progress", [&](detail::Recorder& rec) {
    const double eps_list[] = {1e-1, 1e-2, 1e-3};
    std::map<std::string, int> branches;
    int progress_steps = 0, witnessed = 0;
    for (int i = 0; i < 100; ++i) {
      const auto p = detail::fuzz_problem(i);
      const auto f = corpus_get(p.name, p.seed, p.dim);
      const double eps = eps_list[(i / 6) % 3];
      const double L1 = f->lipschitz_g1(), L3 = f->lipschitz_g3();
      const double R = detail::guarded_radius(eps, L3);
      Rng rng(opt.seed + static_cast<std::uint64_t>(i));
      const Vector z = detail::random_start(*f, p.name, 12.0 * R, 2.0, rng);
      TrustRegionOptions to;
      to.center = i % 4 == 3 ? CenterOracle::sampled_centroid() : CenterOracle::analytic();
      to.alpha_scale = opt.alpha_scale;
      to.assert_progress = false;
      const std::string tag = fmt::format("run {} ({}, eps={})", i, p.name, eps);
      TrustRegionOutcome out;
      try {
        out = cutting_trust_region(*f, z, eps, L1, L3, R, to, rng);
      } catch (const std::exception& e) {
        rec.check(false, tag + ": " + e.what());
        continue;
      }
      ++branches[to_string(out.branch)];
      if (out.status != TrustRegionStatus::Progress) continue;
      ++progress_steps;
      const double dec = f->eval_value(z) - f->eval_value(out.z_plus);
      const double bound = std::min(10.0 * L3 * std::pow(R, 4), eps * eps / (168.0 * R * R * L3));
      rec.check(dec >= bound - 1e-12, fmt::format("{}: decrease {:.6g} < {:.6g} ({})", tag, dec, bound,
                                                  to_string(out.branch)));
      // branch-specific bounds
      switch (out.branch) {
        case Branch::prox_stationary:
          rec.check(dec >= eps * eps / (168.0 * L3 * R * R) - 1e-12, tag + ": prox-stationary bound");
          break;
        case Branch::escaped_ball:
          rec.check(dec >= 10.5 * L3 * std::pow(R, 4) - 1e-12, tag + ": escaped-ball bound");
          break;
        case Branch::nonconvex_pair:
        case Branch::grad_small_curv_bad:
          if (detail::min_curvature_on_segment(*f, *out.exploit_center, *out.exploit_direction, R) <=
              -21.0 * L3 * R * R) {
            ++witnessed;
            rec.check(dec >= 536.0 * L3 * std::pow(R, 4) - 1e-12, tag + ": negative-curvature bound");
          }
          break;
        default:
          break;
      }
    }
    rec.check(progress_steps > 0, "no Progress outcome was produced");
    std::string summary =
        fmt::format("{} Progress outcomes ({} with a verified curvature witness); branches:", progress_steps, witnessed);
    for (const auto& [b, n] : branches) summary += fmt::format(" {}={}", b, n);
    rec.note(summary);
  });
}

/// Guarded loop on doublewell2d: termination conditions and iteration budget.
inline SuiteResult suite_iteration_budget(const ValidationOptions& opt = {}) {
  return detail::run_suite("iteration_budget", [&](detail::Recorder& rec) {
    for (double eps : {1e-2, 1e-3}) {
      const auto f = corpus_get("doublewell2d");
      SolverConfig cfg;
      cfg.epsilon = eps;
      cfg.seed = opt.seed;
      cfg.alpha_scale = opt.alpha_scale;
      const RunReport rep = guarded_loop(*f, default_start("doublewell2d", 2), cfg);
      const double L3 = f->lipschitz_g3();
      const Vector& zm = rep.final_point();
      const double g = f->eval_gradient(zm).norm();
      const double lam = min_eigpair(f->eval_hessian(zm)).lambda_min;
      const double alpha = 21.0 * L3 * rep.R * rep.R;
      const std::string tag = fmt::format("eps={}", eps);
      rec.check(rep.converged && rep.status == "second_order_stationary", tag + ": did not terminate at an SOSP");
      rec.check(g <= eps, fmt::format("{}: |grad| = {:.6g}", tag, g));
      rec.check(lam >= -alpha, fmt::format("{}: lambda_min = {:.6g} < -alpha = {:.6g}", tag, lam, -alpha));
      double fmin = rep.iterations.front().f;
      for (const auto& it : rep.iterations) fmin = std::min(fmin, f->eval_value(it.z));
      const double delta = f->eval_value(rep.iterations.front().z) - fmin;
      const double bound = 20.0 * delta * std::cbrt(L3) * std::pow(eps, -4.0 / 3.0) + 1.0;
      rec.check(rep.outer_iterations <= bound, fmt::format("{}: m = {} > {:.6g}", tag, rep.outer_iterations, bound));
      const double per_step = std::pow(L3, -1.0 / 3.0) * std::pow(eps, 4.0 / 3.0) / 20.0;
      for (std::size_t t = 1; t + 1 < rep.iterations.size(); ++t) {
        const double dec = f->eval_value(rep.iterations[t - 1].z) - f->eval_value(rep.iterations[t].z);
        rec.check(dec >= per_step - 1e-12, fmt::format("{}: iteration {} decreased f by {:.6g} < {:.6g}", tag, t,
                                                       dec, per_step));
      }
      rec.note(fmt::format("{}: m = {}, bound {:.1f}, |grad| = {:.3g}, lambda_min = {:.4g}", tag,
                           rep.outer_iterations, bound, g, lam));
    }
  });
}

/// Log-log slopes of outer iterations against 1/eps for the guarded loop and
/// for gradient descent on the slow-tail problem.
inline SuiteResult suite_scaling(const ValidationOptions& opt = {}) {
  return detail::run_suite("scaling", [&](detail::Recorder& rec) {
    SweepSpec spec;
    spec.problem = "slow_tail1d";
    spec.base.seed = opt.seed;
    spec.base.max_outer = 5'000'000;
    spec.base.alpha_scale = opt.alpha_scale;
    const auto cells = run_sweep(spec);
    for (const auto& c : cells)
      rec.check(c.error.empty(), fmt::format("{} eps={}: {}", to_string(c.mode), c.epsilon, c.error));
    const auto g = fit_mode(cells, SolverMode::guarded);
    const auto b = fit_mode(cells, SolverMode::gd_baseline);
    if (!rec.check(g && b, "not enough completed cells to fit")) return;
    rec.check(g->slope <= 1.4, fmt::format("guarded slope {:.4f} > 1.4", g->slope));
    rec.check(b->slope >= 1.7, fmt::format("gd slope {:.4f} < 1.7", b->slope));
    rec.check(g->r_squared >= 0.9, fmt::format("guarded R^2 {:.4f}", g->r_squared));
    rec.check(b->r_squared >= 0.9, fmt::format("gd R^2 {:.4f}", b->r_squared));
    auto counts = [](const ScalingFit& f) {
      std::string s;
      for (double v : f.iterations) s += fmt::format(" {}", v);
      return s;
    };
    rec.note(fmt::format("guarded slope {:.4f} (R^2 {:.4f}) counts{}", g->slope, g->r_squared, counts(*g)));
    rec.note(fmt::format("gd slope {:.4f} (R^2 {:.4f}) counts{}", b->slope, b->r_squared, counts(*b)));
  });
}

/// Volume of the localization set after N = ceil((d/tau) log(R/r)) cuts on a
/// convex quadratic, and the per-cut shrink factor at a few budgets.
inline SuiteResult suite_volume(const ValidationOptions& opt = {}) {
  return detail::run_suite("volume", [&](detail::Recorder& rec) {
    const auto f = corpus_get("convex_quadratic", 0, 2);
    const Vector x0 = (Vector(2) << 0.35, -0.25).finished();  // minimizer is off-center
    const double R = 1.0, r = 0.1;
    const int samples = 100000;
    for (const CenterOracle& oc : {CenterOracle::analytic(), CenterOracle::sampled_centroid()}) {
      const std::string kind = oc.kind == CenterKind::analytic ? "analytic" : "centroid";
      Rng rng(opt.seed);
      const int N = static_cast<int>(std::ceil(2.0 / oc.tau * std::log(R / r)));
      const CuttingRun run = cutting_plane_method(*f, x0, N, R, oc, rng);
      const VolumeEstimate v = estimate_volume_mc(run.region, samples, rng);
      const double target = 0.5 * unit_ball_volume(2) * r * r;
      rec.check(v.estimate <= target + 3.0 * v.std_error,
                fmt::format("{}: vol(S^N) = {:.4g} +- {:.2g} > {:.4g}", kind, v.estimate, v.std_error, target));
      rec.check(run.region.contains(Vector::Zero(2)), kind + ": minimizer was cut away");
      rec.note(fmt::format("{}: N = {}, vol(S^N) = {:.4g} +- {:.2g}, target {:.4g}", kind, N, v.estimate,
                           v.std_error, target));
      // per-cut shrink factor
      for (int n : {5, 10, 20}) {
        Rng r2(opt.seed + static_cast<std::uint64_t>(n));
        const CuttingRun rn = cutting_plane_method(*f, x0, n, R, oc, r2);
        const VolumeEstimate vn = estimate_volume_mc(rn.region, samples, r2);
        const VolumeEstimate v0 = estimate_volume_mc(region_prefix(rn.region, 1), samples, r2);
        const double factor = std::pow(1.0 - oc.tau, n);
        const double sigma = std::hypot(vn.std_error, factor * v0.std_error);
        rec.check(vn.estimate <= factor * v0.estimate + 3.0 * sigma,
                  fmt::format("{}: N = {}: vol ratio {:.4g} above (1 - tau)^N = {:.4g}", kind, n,
                              vn.estimate / v0.estimate, factor));
        rec.note(fmt::format("{}: N = {}: vol(S^N)/vol(S^0) = {:.4g}, (1 - tau)^N = {:.4g}", kind, n,
                             vn.estimate / v0.estimate, factor));
      }
    }
  });
}

/// Certificate trichotomy on 100 fuzzed proximal problems and the
/// distribution of the sample count K.
inline SuiteResult suite_certificate(const ValidationOptions& opt = {}) {
  return detail::run_suite("certificate", [&](detail::Recorder& rec) {
    const double eps_list[] = {1e-1, 1e-2, 1e-3};
    std::vector<int> Ks;
    std::map<std::string, int> kinds;
    for (int i = 0; i < 100; ++i) {
      const auto p = detail::fuzz_problem(i + 1000);
      const auto f = corpus_get(p.name, p.seed, p.dim);
      const double eps = eps_list[i % 3];
      const double L1 = f->lipschitz_g1(), L3 = f->lipschitz_g3();
      const double R = detail::guarded_radius(eps, L3);
      Rng rng(opt.seed + 7919 * static_cast<std::uint64_t>(i));
      const Vector z = detail::random_start(*f, p.name, 12.0 * R, 2.0, rng);
      const double alpha = opt.alpha_scale * 21.0 * L3 * R * R;
      const ProxFunction fhat(*f, z, alpha);
      const double Lhat1 = L1 + alpha, epshat = eps / 2.0;
      const CenterOracle oc = i % 4 == 3 ? CenterOracle::sampled_centroid() : CenterOracle::analytic();
      const CuttingRun run = cutting_plane_method(fhat, z, cut_budget(f->dim(), oc.tau, Lhat1, R, epshat), R, oc, rng);
      const std::string tag = fmt::format("run {} ({}, eps={})", i, p.name, eps);
      // several independent sampling stages on the same region
      for (int rep = 0; rep < 4; ++rep) {
        Rng srng(opt.seed * 31 + 1000 * static_cast<std::uint64_t>(i) + static_cast<std::uint64_t>(rep));
        CertificateOutcome c;
        try {
          c = nonconvexity_certificate(fhat, run, Lhat1, epshat, R, srng);
        } catch (const std::exception& e) {
          rec.check(false, tag + ": " + e.what());
          break;
        }
        ++kinds[to_string(c.kind)];
        // recompute each case predicate independently
        double fbest = fhat.eval_value(run.iterates.front());
        std::size_t best = 0;
        for (std::size_t t = 1; t < run.iterates.size(); ++t) {
          const double v = fhat.eval_value(run.iterates[t]);
          if (v < fbest) {
            fbest = v;
            best = t;
          }
        }
        const bool small = fhat.eval_gradient(run.iterates[best]).norm() <= epshat;
        const double fu = fhat.eval_value(c.u);
        const bool outside = (c.u - z).norm() > R;
        bool pair = false;
        for (std::size_t t = 0; t < run.iterates.size() && !pair; ++t) {
          const Vector& v = run.iterates[t];
          pair = fu < fhat.eval_value(v) + fhat.eval_gradient(v).dot(c.u - v);
        }
        const bool p_stat = small;
        const bool p_esc = !small && outside;
        const bool p_pair = !small && !outside && pair;
        const int count = int(p_stat) + int(p_esc) + int(p_pair);
        rec.check(count == 1, fmt::format("{}: {} case predicates hold", tag, count));
        const bool matches = (c.kind == CertificateCase::StationaryOfProx && p_stat) ||
                             (c.kind == CertificateCase::EscapedBall && p_esc) ||
                             (c.kind == CertificateCase::NonconvexPair && p_pair);
        rec.check(matches, tag + ": reported case disagrees with the predicates");
        rec.check(fu <= fbest + 1e-12 * std::max(1.0, std::abs(fbest)),
                  fmt::format("{}: fhat(u) = {:.17g} > fhat(x_best) = {:.17g}", tag, fu, fbest));
        if (c.kind == CertificateCase::NonconvexPair) {
          const Vector& v = *c.v;
          rec.check(fu < fhat.eval_value(v) + fhat.eval_gradient(v).dot(c.u - v), tag + ": pair is not strict");
        }
        if (c.kind != CertificateCase::StationaryOfProx) Ks.push_back(c.K);
        if (c.kind == CertificateCase::StationaryOfProx) break;  // deterministic, no sampling to repeat
      }
    }
    const double n = static_cast<double>(Ks.size());
    rec.check(Ks.size() >= 200, fmt::format("only {} K values recorded", Ks.size()));
    if (Ks.empty()) return;
    double mean = 0.0;
    int tail = 0;
    for (int k : Ks) {
      mean += k;
      if (k >= 8) ++tail;
    }
    mean /= n;
    const double p = tail / n;
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    rec.check(mean <= 2.5, fmt::format("mean K = {:.4f} > 2.5", mean));
    rec.check(p <= std::pow(2.0, -7) + 3.0 * sigma, fmt::format("P(K >= 8) = {:.4g}", p));
    std::string summary = fmt::format("{} K values, mean {:.4f}, max {}, P(K >= 8) = {:.4g}; cases:", Ks.size(),
                                      mean, *std::max_element(Ks.begin(), Ks.end()), p);
    for (const auto& [k, c] : kinds) summary += fmt::format(" {}={}", k, c);
    rec.note(summary);
  });
}

/// A line function q(theta) along s through c, plus a harmless quadratic in
/// the orthogonal directions.
class LineQuartic final : public OracleFunction {
 public:
  LineQuartic(Vector c, Vector s, std::array<double, 5> coef, double L3)
      : OracleFunction(static_cast<int>(c.size()), 1.0, L3, ValidityBall{}),
        c_(std::move(c)),
        s_(std::move(s)),
        k_(coef) {}

  // q(theta) = k0 + k1 theta + k2 theta^2/2 + k3 theta^3/6 + k4 theta^4/24
  double q(double t, int order) const {
    switch (order) {
      case 0:
        return k_[0] + k_[1] * t + k_[2] * t * t / 2 + k_[3] * t * t * t / 6 + k_[4] * t * t * t * t / 24;
      case 1:
        return k_[1] + k_[2] * t + k_[3] * t * t / 2 + k_[4] * t * t * t / 6;
      case 2:
        return k_[2] + k_[3] * t + k_[4] * t * t / 2;
      default:
        return k_[3] + k_[4] * t;
    }
  }

  double eval_value(const Vector& x) const override {
    const Vector h = x - c_;
    const double t = s_.dot(h);
    return q(t, 0) + 0.5 * (h - t * s_).squaredNorm();
  }
  Vector eval_gradient(const Vector& x) const override {
    const Vector h = x - c_;
    const double t = s_.dot(h);
    return q(t, 1) * s_ + (h - t * s_);
  }
  Matrix eval_hessian(const Vector& x) const override {
    const double t = s_.dot(x - c_);
    const Matrix P = Matrix::Identity(dim(), dim()) - s_ * s_.transpose();
    return q(t, 2) * s_ * s_.transpose() + P;
  }
  Matrix eval_third_contract(const Vector& x, const Vector& d) const override {
    const double t = s_.dot(x - c_);
    return q(t, 3) * s_.dot(d) * s_ * s_.transpose();
  }

 private:
  Vector c_, s_;
  std::array<double, 5> k_;
};

/// Four-point exploitation on 1000 random quartics that satisfy the
/// curvature hypothesis, in unit scale and through the library call.
inline SuiteResult suite_exploit(const ValidationOptions& opt = {}) {
  return detail::run_suite("exploit", [&](detail::Recorder& rec) {
    Rng rng(opt.seed);
    using detail::uniform;
    double worst_unit = -std::numeric_limits<double>::infinity();
    double worst_scaled = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
      // unit scale: |h''''| <= 1 and h''(gamma) <= -21 for some |gamma| <= 1
      const double a4 = uniform(rng, -1.0, 1.0);
      const double a3 = uniform(rng, -50.0, 50.0);
      const double gamma = uniform(rng, -1.0, 1.0);
      // every third case sits on the curvature boundary, nudged by 1e-6 so the
      // scaled witness check survives rounding
      const double extra = i % 3 == 0 ? 1e-6 : uniform(rng, 0.0, 40.0);
      const double a2 = -21.0 - extra - a3 * gamma - a4 * gamma * gamma / 2.0;
      const double a1 = uniform(rng, -500.0, 500.0);
      const double a0 = uniform(rng, -10.0, 10.0);
      auto h = [&](double t) { return a0 + a1 * t + a2 * t * t / 2 + a3 * t * t * t / 6 + a4 * t * t * t * t / 24; };
      const double hmin = std::min({h(12.0), h(9.0), h(-9.0), h(-12.0)});
      const double slack = 1e-9 * std::max(1.0, std::abs(a0));
      worst_unit = std::max(worst_unit, hmin - (h(0.0) - 536.0));
      rec.check(hmin <= h(0.0) - 536.0 + slack, fmt::format("unit quartic {}: min {:.6g} vs h(0) - 536 = {:.6g}", i,
                                                           hmin, h(0.0) - 536.0));

      // scaled: q(theta) = L3 R^4 h(theta / R) along a random line in R^3
      const double L3 = std::exp(uniform(rng, std::log(0.1), std::log(10.0)));
      const double R = std::exp(uniform(rng, std::log(0.01), std::log(1.0)));
      const double sc = L3 * std::pow(R, 4);
      const std::array<double, 5> k = {sc * a0, sc * a1 / R, sc * a2 / (R * R), sc * a3 / (R * R * R),
                                       sc * a4 / (R * R * R * R)};
      const Vector c = standard_normal(3, rng);
      const Vector s = random_unit_vector(3, rng);
      const LineQuartic f(c, s, k, L3);
      rec.check(check_curvature_witness(f, c, s, gamma, L3, R), fmt::format("scaled quartic {}: no witness", i));
      const ExploitStep step = exploit_nc_step(f, c, s, R);
      const double q0 = f.eval_value(c);
      const double gap = step.value - (q0 - 536.0 * sc);
      worst_scaled = std::max(worst_scaled, gap / sc);
      rec.check(gap <= 1e-9 * std::max(1.0, std::abs(q0)),
                fmt::format("scaled quartic {}: value {:.6g} vs q(0) - 536 L3 R^4 = {:.6g}", i, step.value,
                            q0 - 536.0 * sc));
    }
    rec.note(fmt::format("worst margin (unit) {:.4g}; worst margin / (L3 R^4) (scaled) {:.4g}", worst_unit,
                         worst_scaled));
  });
}

struct ChernoffSample {
  std::vector<double> kbar;  // one per completed run
  int outer_iterations = 0;
  std::vector<std::string> errors;
};

/// Guarded runs from random starts on a rotation of corpus problems; records
/// the mean sample count of each run.
inline ChernoffSample chernoff_experiment(int runs, double eps, std::uint64_t seed, double alpha_scale = 1.0) {
  const std::vector<std::string> names = {"doublewell2d", "doublewell1d", "random_quartic", "slow_tail1d"};
  ChernoffSample out;
  for (int i = 0; i < runs; ++i) {
    const std::string& name = names[static_cast<std::size_t>(i) % names.size()];
    const auto f = corpus_get(name, static_cast<std::uint64_t>(i), 2);
    SolverConfig cfg;
    cfg.epsilon = eps;
    cfg.seed = seed + static_cast<std::uint64_t>(i);
    cfg.alpha_scale = alpha_scale;
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    const double R = detail::guarded_radius(cfg.epsilon, f->lipschitz_g3());
    try {
      const Vector z0 = detail::random_start(*f, name, 12.0 * R + 0.5, 1.5, rng);
      const RunReport rep = guarded_loop(*f, z0, cfg);
      double s = 0.0;
      for (int k : rep.K_list) s += k;
      out.kbar.push_back(s / static_cast<double>(rep.K_list.size()));
      out.outer_iterations += rep.outer_iterations;
    } catch (const std::exception& e) {
      out.errors.push_back(fmt::format("run {} ({}): {}", i, name, e.what()));
    }
  }
  return out;
}

/// Empirical P(Kbar >= y) and its binomial standard error.
inline std::pair<double, double> tail_probability(const std::vector<double>& kbar, double y) {
  if (kbar.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(kbar.size());
  const double p = std::count_if(kbar.begin(), kbar.end(), [&](double k) { return k >= y; }) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

inline double chernoff_bound(double y) { return std::exp((1.0 - y) / 10.0); }

/// Tail of the per-run mean sample count across guarded runs.
inline SuiteResult suite_chernoff(const ValidationOptions& opt = {}) {
  return detail::run_suite("chernoff", [&](detail::Recorder& rec) {
    const ChernoffSample cs = chernoff_experiment(40, 1e-2, opt.seed, opt.alpha_scale);
    for (const auto& e : cs.errors) rec.check(false, e);
    rec.check(cs.outer_iterations >= 30, fmt::format("only {} outer iterations aggregated", cs.outer_iterations));
    for (double y : {5.0, 11.0, 21.0}) {
      const auto [p, sigma] = tail_probability(cs.kbar, y);
      rec.check(p <= chernoff_bound(y) + 3.0 * sigma,
                fmt::format("P(Kbar >= {}) = {:.4g} > {:.4g}", y, p, chernoff_bound(y)));
      rec.note(fmt::format("y = {}: P(Kbar >= y) = {:.4g}, bound {:.4g}", y, p, chernoff_bound(y)));
    }
    rec.note(fmt::format("{} runs, {} outer iterations, max Kbar {:.4g}", cs.kbar.size(), cs.outer_iterations,
                         cs.kbar.empty() ? 0.0 : *std::max_element(cs.kbar.begin(), cs.kbar.end())));
  });
}

/// Deviation of the regularized third-order model from f near its expansion
/// point.
inline SuiteResult suite_model_bounds(const ValidationOptions& opt = {}) {
  return detail::run_suite("model_bounds", [&](detail::Recorder& rec) {
    struct Case {
      std::string name;
      std::uint64_t seed;
      int dim;
    };
    const std::vector<Case> cases = {{"doublewell2d", 0, 2}, {"random_quartic", 1, 2}, {"random_quartic", 2, 3},
                                     {"random_quartic", 3, 2}, {"random_quartic", 4, 3}};
    Rng rng(opt.seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& cs : cases) {
      const auto f = corpus_get(cs.name, cs.seed, cs.dim);
      const double L3 = f->lipschitz_g3();
      const double R = std::pow(L3, -1.0 / 3.0) * std::cbrt(0.1) / 24.0;
      // the trust ball of the quartic loop, and a much wider one
      for (double radius : {12.0 * R, 1.5}) {
        const Vector z = detail::random_start(*f, cs.name, radius, 3.0, rng);
        const Taylor3Model m(*f, z, radius);
        for (int k = 0; k < 100; ++k) {
          const Vector x = sample_uniform_ball(z, radius, rng);
          const double h = (x - z).norm();
          const double ge = (f->eval_gradient(x) - m.eval_gradient(x)).norm();
          const Matrix D = f->eval_hessian(x) - m.eval_hessian(x);
          const double he = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (D + D.transpose())).eigenvalues().cwiseAbs().maxCoeff();
          const double fe = m.eval_value(x) - f->eval_value(x);
          const std::string tag = fmt::format("{}[{}] radius {:.3g} sample {}", cs.name, cs.seed, radius, k);
          rec.check(ge <= L3 / 3.0 * h * h * h + 1e-8, fmt::format("{}: gradient gap {:.6g}", tag, ge));
          rec.check(he <= L3 * h * h + 1e-8, fmt::format("{}: Hessian gap {:.6g}", tag, he));
          rec.check(fe >= -1e-10, fmt::format("{}: model below f by {:.6g}", tag, -fe));
          if (h > 0.0) worst = std::max(worst, ge / (L3 * h * h * h));
        }
      }
    }
    rec.note(fmt::format("largest gradient gap / (L3 h^3) = {:.4f} (bound 1/3)", worst));
  });
}

/// Quartic-model loop: termination on f, transfer of model decrease, and the
/// oracle-call pattern.
inline SuiteResult suite_quartic(const ValidationOptions& opt = {}) {
  return detail::run_suite("quartic", [&](detail::Recorder& rec) {
    struct Case {
      std::string name;
      std::uint64_t seed;
      int dim;
      double eps;
    };
    for (const Case& cs : {Case{"doublewell2d", 0, 2, 1e-2}, Case{"random_quartic", 0, 2, 1e-2},
                           Case{"doublewell2d", 0, 2, 1e-3}}) {
      const auto f = corpus_get(cs.name, cs.seed, cs.dim);
      SolverConfig cfg;
      cfg.epsilon = cs.eps;
      cfg.seed = opt.seed;
      cfg.alpha_scale = opt.alpha_scale;
      const RunReport rep = quartic_loop(*f, default_start(cs.name, cs.dim), cfg);
      const std::string tag = fmt::format("{} eps={}", cs.name, cs.eps);
      const Vector& zm = rep.final_point();
      const double g = f->eval_gradient(zm).norm();
      const double lam = min_eigpair(f->eval_hessian(zm)).lambda_min;
      const double thr = std::cbrt(f->lipschitz_g3()) * std::pow(cs.eps, 2.0 / 3.0);
      rec.check(rep.converged, tag + ": did not converge");
      rec.check(g <= cs.eps, fmt::format("{}: |grad f| = {:.6g}", tag, g));
      rec.check(lam >= -thr, fmt::format("{}: lambda_min = {:.6g} < {:.6g}", tag, lam, -thr));
      for (std::size_t t = 1; t < rep.iterations.size(); ++t) {
        const auto& it = rep.iterations[t];
        const double fdec = f->eval_value(rep.iterations[t - 1].z) - f->eval_value(it.z);
        rec.check(fdec >= it.model_decrease - 1e-12 * std::max(1.0, std::abs(it.f)),
                  fmt::format("{}: iteration {}: f decrease {:.6g} < model decrease {:.6g}", tag, t, fdec,
                              it.model_decrease));
        rec.check(it.counters.n3 - rep.iterations[t - 1].counters.n3 == 1,
                  fmt::format("{}: iteration {} made {} order-3 requests", tag, t,
                              it.counters.n3 - rep.iterations[t - 1].counters.n3));
      }
      rec.check(rep.counters.n3 == static_cast<std::uint64_t>(rep.outer_iterations), tag + ": n3 != m");
      rec.check(rep.inner_f_calls == 0, fmt::format("{}: {} f calls inside model solves", tag, rep.inner_f_calls));
      rec.note(fmt::format("{}: m = {}, |grad| = {:.3g}, lambda_min = {:.4g}, counters n0={} n1={} n2={} n3={}", tag,
                           rep.outer_iterations, g, lam, rep.counters.n0, rep.counters.n1, rep.counters.n2,
                           rep.counters.n3));
    }
    // outside the regime the loop refuses to start
    const auto f = corpus_get("doublewell2d");
    SolverConfig cfg;
    cfg.epsilon = 1e4;
    bool refused = false;
    try {
      quartic_loop(*f, default_start("doublewell2d", 2), cfg);
    } catch (const RegimeViolation&) {
      refused = true;
    }
    rec.check(refused, "eps outside the quartic regime was accepted");
  });
}

/// Scripted cuts on the double well remove every stationary point, and the
/// certificate stage still finds a strict nonconvexity pair.
inline SuiteResult suite_scripted_doublewell(const ValidationOptions& opt = {}) {
  return detail::run_suite("scripted_doublewell", [&](detail::Recorder& rec) {
    const Trace2d tr = scripted_doublewell::scripted_trace(opt.seed);
    const auto f = corpus_get("doublewell2d");
    const LocalizationSet& s = tr.run.region;
    rec.check(tr.markers.size() == 9, "expected nine stationary points");
    for (const Vector& p : tr.markers) {
      rec.check(f->eval_gradient(p).norm() == 0.0, "marker is not stationary");
      // membership straight from the cut list
      bool excluded = (p - s.center0()).norm() > s.radius();
      for (const Cut& c : s.cuts()) excluded = excluded || c.normal.dot(p - c.anchor) > 0.0;
      rec.check(excluded, fmt::format("stationary point ({}, {}) survives the cuts", p(0), p(1)));
    }
    rec.check(final_region_excludes_markers(tr), "trace membership column disagrees");
    if (!rec.check(tr.certificate.has_value(), "certificate failed: " + tr.certificate_error)) return;
    const auto& c = *tr.certificate;
    rec.check(c.kind == CertificateCase::NonconvexPair, std::string("certificate case ") + to_string(c.kind));
    if (c.v) {
      const Vector& v = *c.v;
      const double lhs = f->eval_value(c.u);
      const double rhs = f->eval_value(v) + f->eval_gradient(v).dot(c.u - v);
      rec.check(lhs < rhs, fmt::format("f(u) = {:.6g} is not below the linearization {:.6g}", lhs, rhs));
      rec.note(fmt::format("K = {}, u = ({:.4f}, {:.4f}), v = iterate {}, f(u) = {:.4f} < {:.4f}", c.K, c.u(0),
                           c.u(1), *c.v_index, lhs, rhs));
    }
  });
}

/// Analytic derivatives against finite differences, and the Hessian-free
/// first-order loop.
inline SuiteResult suite_oracle_hygiene(const ValidationOptions& opt = {}) {
  return detail::run_suite("oracle_hygiene", [&](detail::Recorder& rec) {
    struct Case {
      std::string name;
      std::uint64_t seed;
      int dim;
    };
    const std::vector<Case> cases = {{"doublewell2d", 0, 2},   {"doublewell1d", 0, 1},   {"convex_quadratic", 0, 2},
                                     {"convex_quadratic", 0, 3}, {"rosenbrock2d", 0, 2},   {"random_quartic", 0, 2},
                                     {"random_quartic", 1, 3},   {"random_quartic", 2, 4}, {"slow_tail1d", 0, 1}};
    Rng rng(opt.seed);
    double worst = 0.0;
    for (const auto& cs : cases) {
      const auto f = corpus_get(cs.name, cs.seed, cs.dim);
      for (int k = 0; k < 5; ++k) {
        const Vector x = detail::random_start(*f, cs.name, 0.5, 2.0, rng);
        const FiniteDifferenceReport r = finite_difference_check(*f, x, 1e-5);
        worst = std::max(worst, r.max_error());
        rec.check(r.passed, fmt::format("{}[{}] d={} point {}: max rel error {:.3g}", cs.name, cs.seed, cs.dim, k,
                                        r.max_error()));
      }
    }
    rec.note(fmt::format("largest relative finite-difference error {:.3g}", worst));

    const auto f = corpus_get("doublewell2d");
    SolverConfig cfg;
    cfg.epsilon = 1e-3;
    cfg.seed = opt.seed;
    cfg.alpha_scale = opt.alpha_scale;
    const RunReport rep = first_order_loop(*f, default_start("doublewell2d", 2), cfg);
    rec.check(rep.counters.n2 == 0, fmt::format("first-order loop made {} Hessian calls", rep.counters.n2));
    rec.check(f->eval_gradient(rep.final_point()).norm() <= 1e-3, "first-order loop ended above eps");
    rec.note(fmt::format("first-order loop: m = {}, n1 = {}, n2 = {}", rep.outer_iterations, rep.counters.n1,
                         rep.counters.n2));
  });
}

struct SuiteEntry {
  std::string name;
  std::function<SuiteResult(const ValidationOptions&)> run;
};

inline const std::vector<SuiteEntry>& suites() {
  static const std::vector<SuiteEntry> all = {
      {"progress", suite_progress},         {"iteration_budget", suite_iteration_budget},
      {"scaling", suite_scaling},           {"volume", suite_volume},
      {"certificate", suite_certificate},   {"exploit", suite_exploit},
      {"chernoff", suite_chernoff},         {"model_bounds", suite_model_bounds},
      {"quartic", suite_quartic},           {"scripted_doublewell", suite_scripted_doublewell},
      {"oracle_hygiene", suite_oracle_hygiene}};
  return all;
}

}  // namespace guiltycut::validation
