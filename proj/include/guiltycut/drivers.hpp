#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "guiltycut/exploit.hpp"
#include "guiltycut/oracle.hpp"
#include "guiltycut/region.hpp"
#include "guiltycut/taylor_model.hpp"
#include "guiltycut/trust_region.hpp"

namespace guiltycut {

enum class SolverMode { guarded, quartic, first_order, gd_baseline };

inline const char* to_string(SolverMode m) {
  switch (m) {
    case SolverMode::guarded:
      return "guarded";
    case SolverMode::quartic:
      return "quartic";
    case SolverMode::first_order:
      return "first_order";
    case SolverMode::gd_baseline:
      return "gd_baseline";
  }
  return "?";
}

inline SolverMode parse_mode(const std::string& s) {
  if (s == "guarded") return SolverMode::guarded;
  if (s == "quartic") return SolverMode::quartic;
  if (s == "first_order") return SolverMode::first_order;
  if (s == "gd_baseline" || s == "gd") return SolverMode::gd_baseline;
  throw ConfigurationError("unknown mode '" + s + "'");
}

struct SolverConfig {
  double epsilon = 1e-3;
  double L1 = 0.0;  // 0 = take the oracle's constant
  double L3 = 0.0;  // 0 = take the oracle's constant
  std::optional<double> R_override;
  CenterOracle center = CenterOracle::analytic();
  std::uint64_t seed = 0;
  int max_outer = 100000;
  SolverMode mode = SolverMode::guarded;
  double delta = 1e-6;
  /// Wall-clock budget in seconds; the run stops once it exceeds
  /// (1 + 10 log(1/delta)) times this value.
  std::optional<double> time_budget_seconds;
  double alpha_scale = 1.0;
};

struct IterationRecord {
  int t = 0;
  Vector z;
  double f = 0.0;
  double grad_norm = 0.0;
  double decrease = 0.0;
  int K = 0;
  std::string branch;
  EvalCounters counters;
  double model_decrease = 0.0;  // quartic mode only
};

struct RunReport {
  std::string problem;
  SolverMode mode = SolverMode::guarded;
  double epsilon = 0.0;
  double L1 = 0.0;
  double L3 = 0.0;
  double R = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;

  std::vector<IterationRecord> iterations;  // iterations[0] is the start point
  std::vector<int> K_list;
  double K_bar = 0.0;
  EvalCounters counters;

  std::string status;
  bool converged = false;
  int outer_iterations = 0;
  double final_grad_norm = 0.0;
  std::optional<double> final_lambda_min;
  bool second_order_ok = false;         // lambda_min >= -alpha
  bool strict_second_order_ok = false;  // lambda_min >= -L3^(1/3) eps^(2/3)
  double required_per_iteration_decrease = 0.0;
  bool per_iteration_decrease_ok = true;
  double delta_observed = 0.0;
  double iteration_bound = 0.0;
  bool iteration_bound_ok = true;
  bool transfer_ok = true;          // quartic: f-decrease >= model decrease
  std::uint64_t inner_f_calls = 0;  // quartic: f oracle calls made inside model solves
  double wall_seconds = 0.0;
  std::vector<std::string> notes;

  const Vector& final_point() const { return iterations.back().z; }
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct ResolvedConstants {
  double L1;
  double L3;
};

inline ResolvedConstants resolve(const OracleFunction& f, const SolverConfig& cfg) {
  ResolvedConstants c{cfg.L1 > 0.0 ? cfg.L1 : f.lipschitz_g1(), cfg.L3 > 0.0 ? cfg.L3 : f.lipschitz_g3()};
  if (!(cfg.epsilon > 0.0)) throw ConfigurationError("epsilon must be positive");
  if (!(c.L1 > 0.0) || !(c.L3 > 0.0)) throw ConfigurationError("Lipschitz constants must be positive");
  if (cfg.max_outer < 1) throw ConfigurationError("max_outer must be at least 1");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigurationError("delta must lie in (0, 1)");
  return c;
}

inline void check_validity(const OracleFunction& f, const Vector& z, double radius) {
  if (!f.validity().covers(z, radius)) {
    std::ostringstream msg;
    msg << "Lipschitz constants of " << f.name() << " are only valid within radius " << f.validity().radius
        << "; iterate at distance " << (z - f.validity().center).norm() << " needs a ball of radius " << radius;
    throw ConfigurationError(msg.str());
  }
}

inline void check_time(const Stopwatch& clock, const SolverConfig& cfg) {
  if (!cfg.time_budget_seconds) return;
  const double limit = *cfg.time_budget_seconds * (1.0 + 10.0 * std::log(1.0 / cfg.delta));
  if (clock.seconds() > limit) throw RuntimeBudgetExceeded("wall-clock budget exceeded");
}

inline RunReport start_report(const OracleFunction& f, const Vector& z0, const SolverConfig& cfg,
                              const ResolvedConstants& c) {
  RunReport rep;
  rep.problem = f.name();
  rep.mode = cfg.mode;
  rep.epsilon = cfg.epsilon;
  rep.L1 = c.L1;
  rep.L3 = c.L3;
  rep.seed = cfg.seed;
  IterationRecord first;
  first.z = z0;
  first.f = f.eval_value(z0);
  first.grad_norm = f.eval_gradient(z0).norm();
  first.branch = "start";
  first.counters = f.counters();
  rep.iterations.push_back(std::move(first));
  return rep;
}

inline void finish_report(const OracleFunction& f, RunReport& rep, const Stopwatch& clock) {
  rep.counters = f.counters();
  rep.wall_seconds = clock.seconds();
  if (!rep.K_list.empty()) {
    double s = 0.0;
    for (int k : rep.K_list) s += k;
    rep.K_bar = s / static_cast<double>(rep.K_list.size());
  }
  double f_min = rep.iterations.front().f;
  for (const auto& it : rep.iterations) f_min = std::min(f_min, it.f);
  rep.delta_observed = rep.iterations.front().f - f_min;
  rep.final_grad_norm = rep.iterations.back().grad_norm;
}

// m <= 20 Δ L3^(1/3) eps^(-4/3) + 1 for the trust-region loops.
inline void check_iteration_bound(RunReport& rep) {
  rep.iteration_bound = 20.0 * rep.delta_observed * std::cbrt(rep.L3) * std::pow(rep.epsilon, -4.0 / 3.0) + 1.0;
  rep.iteration_bound_ok = rep.outer_iterations <= rep.iteration_bound;
}

inline void record_second_order(const OracleFunction& f, RunReport& rep, double alpha) {
  const Vector& z = rep.final_point();
  const double lam = min_eigpair(f.eval_hessian(z)).lambda_min;
  rep.final_lambda_min = lam;
  rep.second_order_ok = lam >= -alpha;
  rep.strict_second_order_ok = lam >= -std::cbrt(rep.L3) * std::pow(rep.epsilon, 2.0 / 3.0);
}

inline IterationRecord make_record(const OracleFunction& f, int t, const TrustRegionOutcome& out) {
  IterationRecord r;
  r.t = t;
  r.z = out.z_plus;
  r.f = out.f_plus;
  r.grad_norm = f.eval_gradient(out.z_plus).norm();
  r.decrease = out.decrease;
  r.K = out.K;
  r.branch = to_string(out.branch);
  r.counters = f.counters();
  return r;
}

// Shared body of the guarded and first-order loops.
inline RunReport trust_region_loop(const OracleFunction& f, const Vector& z0, const SolverConfig& cfg,
                                   bool first_order) {
  const ResolvedConstants c = resolve(f, cfg);
  const Stopwatch clock;
  RunReport rep = start_report(f, z0, cfg, c);
  const double eps = cfg.epsilon;
  rep.R = cfg.R_override.value_or(std::pow(c.L3, -1.0 / 3.0) * std::cbrt(eps) / 3.0);
  rep.alpha = cfg.alpha_scale * 21.0 * c.L3 * rep.R * rep.R;
  rep.required_per_iteration_decrease =
      cfg.R_override ? progress_bound(eps, c.L3, rep.R) : std::pow(c.L3, -1.0 / 3.0) * std::pow(eps, 4.0 / 3.0) / 20.0;

  TrustRegionOptions opts;
  opts.center = cfg.center;
  opts.first_order = first_order;
  opts.alpha_scale = cfg.alpha_scale;
  Rng rng(cfg.seed);

  Vector z = z0;
  for (int t = 1; t <= cfg.max_outer; ++t) {
    check_validity(f, z, 12.0 * rep.R);
    const TrustRegionOutcome out = cutting_trust_region(f, z, eps, c.L1, c.L3, rep.R, opts, rng);
    rep.iterations.push_back(make_record(f, t, out));
    rep.K_list.push_back(out.K);
    rep.outer_iterations = t;
    if (out.status != TrustRegionStatus::Progress) {
      rep.converged = true;
      rep.status = to_string(out.status);
      finish_report(f, rep, clock);
      check_iteration_bound(rep);
      if (!first_order) record_second_order(f, rep, rep.alpha);
      return rep;
    }
    if (out.decrease < rep.required_per_iteration_decrease - 1e-12) rep.per_iteration_decrease_ok = false;
    z = out.z_plus;
    check_time(clock, cfg);
  }
  throw MaxOuterExceeded("no stationary point within " + std::to_string(cfg.max_outer) + " outer iterations");
}

}  // namespace detail

/// Repeated trust-region steps with R = L3^(-1/3) eps^(1/3) / 3 until one of
/// them returns a second-order stationary point.
inline RunReport guarded_loop(const OracleFunction& f, const Vector& z0, SolverConfig cfg) {
  cfg.mode = SolverMode::guarded;
  return detail::trust_region_loop(f, z0, cfg, false);
}

/// Same loop with the Hessian test removed: only ||∇f|| <= eps is promised,
/// and f's Hessian is never requested.
inline RunReport first_order_loop(const OracleFunction& f, const Vector& z0, SolverConfig cfg) {
  cfg.mode = SolverMode::first_order;
  RunReport rep = detail::trust_region_loop(f, z0, cfg, true);
  if (rep.counters.n2 != 0) rep.notes.push_back("unexpected Hessian evaluations in first-order mode");
  return rep;
}

/// Whether eps <= L1^(3/2) / L3^(1/2), the regime where the quartic loop is
/// worth running.
inline bool quartic_regime_ok(double eps, double L1, double L3) {
  return eps <= std::pow(L1, 1.5) / std::sqrt(L3);
}

/// Trust-region steps on third-order Taylor models with quartic penalty.
/// One order-3 request on f per iteration; the inner solve sees only the model.
inline RunReport quartic_loop(const OracleFunction& f, const Vector& z0, SolverConfig cfg) {
  cfg.mode = SolverMode::quartic;
  const detail::ResolvedConstants c = detail::resolve(f, cfg);
  const double eps = cfg.epsilon;
  if (!quartic_regime_ok(eps, c.L1, c.L3)) {
    std::ostringstream msg;
    msg << "quartic mode needs eps <= L1^(3/2)/L3^(1/2) = " << std::pow(c.L1, 1.5) / std::sqrt(c.L3)
        << ", got eps = " << eps;
    throw RegimeViolation(msg.str());
  }
  const detail::Stopwatch clock;
  RunReport rep = detail::start_report(f, z0, cfg, c);
  rep.R = cfg.R_override.value_or(std::pow(c.L3, -1.0 / 3.0) * std::cbrt(eps) / 24.0);
  // the inner solve runs with (eps/2, 2 L1, 2 L3)
  rep.alpha = cfg.alpha_scale * 21.0 * (2.0 * c.L3) * rep.R * rep.R;
  rep.required_per_iteration_decrease = progress_bound(eps / 2.0, 2.0 * c.L3, rep.R);

  TrustRegionOptions opts;
  opts.center = cfg.center;
  opts.alpha_scale = cfg.alpha_scale;
  Rng rng(cfg.seed);
  const double strict_curvature = std::cbrt(c.L3) * std::pow(eps, 2.0 / 3.0);

  Vector z = z0;
  double f_z = f.value(z);
  for (int t = 1; t <= cfg.max_outer; ++t) {
    detail::check_validity(f, z, 12.0 * rep.R);
    const auto model = taylor3_model(f, z, 12.0 * rep.R);

    const EvalCounters before = f.counters();
    const TrustRegionOutcome out =
        cutting_trust_region(*model, z, eps / 2.0, 2.0 * c.L1, 2.0 * c.L3, rep.R, opts, rng);
    const EvalCounters inner = f.counters() - before;
    rep.inner_f_calls += inner.n0 + inner.n1 + inner.n2 + inner.n3;

    IterationRecord r;
    r.t = t;
    r.z = out.z_plus;
    r.K = out.K;
    r.branch = to_string(out.branch);
    r.model_decrease = out.decrease;
    rep.K_list.push_back(out.K);
    rep.outer_iterations = t;

    if (out.status != TrustRegionStatus::Progress) {
      const Vector g = f.gradient(out.z_plus);
      const double lam = min_eigpair(f.hessian(out.z_plus)).lambda_min;
      r.f = f.value(out.z_plus);
      r.decrease = f_z - r.f;
      r.grad_norm = g.norm();
      r.counters = f.counters();
      rep.iterations.push_back(std::move(r));
      if (g.norm() > eps || lam < -strict_curvature) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "model stationary point does not transfer to f: |grad| = " << g.norm() << ", lambda_min = " << lam;
        throw ProgressAssertionFailed(msg.str());
      }
      rep.converged = true;
      rep.status = to_string(out.status);
      rep.final_lambda_min = lam;
      rep.second_order_ok = lam >= -rep.alpha;
      rep.strict_second_order_ok = lam >= -strict_curvature;
      detail::finish_report(f, rep, clock);
      detail::check_iteration_bound(rep);
      return rep;
    }

    const double f_next = f.value(out.z_plus);
    r.f = f_next;
    r.decrease = f_z - f_next;
    r.grad_norm = f.eval_gradient(out.z_plus).norm();
    r.counters = f.counters();
    if (r.decrease < out.decrease - 1e-12 * std::max(1.0, std::abs(f_z))) {
      rep.transfer_ok = false;
      std::ostringstream msg;
      msg.precision(17);
      msg << "f decreased by " << r.decrease << " but the model by " << out.decrease;
      throw ProgressAssertionFailed(msg.str());
    }
    if (out.decrease < rep.required_per_iteration_decrease - 1e-12) rep.per_iteration_decrease_ok = false;
    rep.iterations.push_back(std::move(r));
    z = out.z_plus;
    f_z = f_next;
    detail::check_time(clock, cfg);
  }
  throw MaxOuterExceeded("no stationary point within " + std::to_string(cfg.max_outer) + " outer iterations");
}

/// x <- x - ∇f(x)/L1 until ||∇f|| <= eps. outer_iterations counts gradient
/// evaluations (steps taken + 1).
inline RunReport gd_baseline(const OracleFunction& f, const Vector& z0, SolverConfig cfg) {
  cfg.mode = SolverMode::gd_baseline;
  const detail::ResolvedConstants c = detail::resolve(f, cfg);
  const detail::Stopwatch clock;
  RunReport rep = detail::start_report(f, z0, cfg, c);
  rep.required_per_iteration_decrease = 0.0;

  Vector x = z0;
  double fx = f.value(x);
  for (int t = 1; t <= cfg.max_outer; ++t) {
    const Vector g = f.gradient(x);
    rep.outer_iterations = t;
    if (g.norm() <= cfg.epsilon) {
      rep.converged = true;
      rep.status = "first_order_stationary";
      detail::finish_report(f, rep, clock);
      return rep;
    }
    const Vector next = x - g / c.L1;
    const double f_next = f.value(next);
    const double guaranteed = g.squaredNorm() / (2.0 * c.L1);
    if (fx - f_next < guaranteed - 1e-12 * std::max(1.0, std::abs(fx))) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "gradient step decreased f by " << fx - f_next << " < " << guaranteed << "; L1 too small?";
      throw ProgressAssertionFailed(msg.str());
    }
    IterationRecord r;
    r.t = t;
    r.z = next;
    r.f = f_next;
    r.grad_norm = f.eval_gradient(next).norm();
    r.decrease = fx - f_next;
    r.branch = "gradient_step";
    r.counters = f.counters();
    rep.iterations.push_back(std::move(r));
    x = next;
    fx = f_next;
    detail::check_time(clock, cfg);
  }
  throw MaxOuterExceeded("gradient descent did not reach eps within " + std::to_string(cfg.max_outer) + " steps");
}

/// Dispatch on cfg.mode.
inline RunReport solve(const OracleFunction& f, const Vector& z0, const SolverConfig& cfg) {
  switch (cfg.mode) {
    case SolverMode::guarded:
      return guarded_loop(f, z0, cfg);
    case SolverMode::quartic:
      return quartic_loop(f, z0, cfg);
    case SolverMode::first_order:
      return first_order_loop(f, z0, cfg);
    case SolverMode::gd_baseline:
      return gd_baseline(f, z0, cfg);
  }
  throw ConfigurationError("unknown mode");
}

}  // namespace guiltycut
