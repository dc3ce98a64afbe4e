#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "guiltycut/oracle.hpp"
#include "guiltycut/region.hpp"

namespace guiltycut {

/// Result of the cutting-plane loop: the final region and every center it
/// queried, together with the gradient observed there (the cut normal).
struct CuttingRun {
  LocalizationSet region;
  std::vector<Vector> iterates;
  std::vector<Vector> gradients;
  std::optional<std::size_t> early_stop;         // index of an iterate with zero gradient
  std::optional<std::size_t> empty_interior_at;  // step at which Centre gave up
};

/// Any callable (const LocalizationSet&, const Vector& warm_start) -> Vector.
using CenterRule = std::function<Vector(const LocalizationSet&, const Vector&)>;

/// Binds a library center oracle to a random stream.
inline CenterRule make_center_rule(const CenterOracle& oracle, Rng& rng) {
  oracle.validate();
  return [oracle, &rng](const LocalizationSet& s, const Vector& warm) { return center(s, oracle, warm, rng); };
}

/// Cutting-plane loop on f̂: S0 = ball(R, x0) cut at x0, then N centers each
/// followed by a cut through it along the gradient of f̂.
inline CuttingRun cutting_plane_method(const OracleFunction& fhat, const Vector& x0, int N, double R,
                                       const CenterRule& centre) {
  if (N < 1) throw ConfigurationError("cutting-plane budget N must be at least 1");
  CuttingRun run{LocalizationSet(x0, R), {}, {}, std::nullopt, std::nullopt};
  run.iterates.reserve(static_cast<std::size_t>(N) + 1);
  run.gradients.reserve(static_cast<std::size_t>(N) + 1);

  auto record = [&](const Vector& x) -> bool {
    const Vector g = fhat.gradient(x);
    run.iterates.push_back(x);
    run.gradients.push_back(g);
    try {
      run.region.push_cut(x, g);
    } catch (const ZeroNormalCut&) {
      run.early_stop = run.iterates.size() - 1;
      return false;
    }
    return true;
  };

  if (!record(x0)) return run;
  for (int t = 1; t <= N; ++t) {
    Vector x;
    try {
      x = centre(run.region, run.iterates.back());
    } catch (const EmptyInteriorSuspected&) {
      run.empty_interior_at = static_cast<std::size_t>(t);
      break;
    }
    fhat.note_center_call();
    if (!record(x)) break;
  }
  return run;
}

inline CuttingRun cutting_plane_method(const OracleFunction& fhat, const Vector& x0, int N, double R,
                                       const CenterOracle& oracle, Rng& rng) {
  return cutting_plane_method(fhat, x0, N, R, make_center_rule(oracle, rng));
}

enum class CertificateCase { StationaryOfProx, EscapedBall, NonconvexPair };

inline const char* to_string(CertificateCase c) {
  switch (c) {
    case CertificateCase::StationaryOfProx:
      return "stationary_of_prox";
    case CertificateCase::EscapedBall:
      return "escaped_ball";
    case CertificateCase::NonconvexPair:
      return "nonconvex_pair";
  }
  return "?";
}

struct CertificateOutcome {
  CertificateCase kind = CertificateCase::StationaryOfProx;
  Vector u;
  std::optional<Vector> v;
  std::optional<std::size_t> v_index;
  int K = 0;
  Vector x_best;
  std::size_t best_index = 0;
  double fhat_u = 0.0;
  double fhat_best = 0.0;
};

/// Largest number of ball samples tolerated before declaring the region
/// broken: 64 (1 + ceil(log2(1/delta))) with delta = 1e-12.
inline int certificate_sample_budget() {
  return 64 * (1 + static_cast<int>(std::ceil(std::log2(1e12))));
}

/// Randomized nonconvexity certificate on the output of the cutting loop.
///
/// Returns either a prox-stationary iterate, a point beyond the trust ball,
/// or a pair (u, v) with f̂(u) < f̂(v) + ∇f̂(v).(u - v). The cut-loop gradients
/// are reused, so this costs N+1 value calls and one value call at u.
inline CertificateOutcome nonconvexity_certificate(const OracleFunction& fhat, const CuttingRun& run, double Lhat1,
                                                   double epshat, double R, Rng& rng) {
  if (run.iterates.empty()) throw ConfigurationError("certificate needs at least one iterate");
  if (!(Lhat1 > 0.0) || !(epshat > 0.0)) throw ConfigurationError("certificate needs positive L̂1 and ε̂");

  const std::size_t n = run.iterates.size();
  std::vector<double> values(n);
  std::size_t best = 0;
  for (std::size_t t = 0; t < n; ++t) {
    values[t] = fhat.value(run.iterates[t]);
    if (values[t] < values[best]) best = t;
  }

  CertificateOutcome out;
  out.best_index = best;
  out.x_best = run.iterates[best];
  out.fhat_best = values[best];

  const Vector& g_best = run.gradients[best];
  if (g_best.norm() <= epshat) {
    out.kind = CertificateCase::StationaryOfProx;
    out.u = out.x_best;
    out.fhat_u = out.fhat_best;
    out.K = 0;
    return out;
  }

  const Vector y = out.x_best - g_best / Lhat1;
  const double r = epshat / (8.0 * Lhat1);
  const int budget = certificate_sample_budget();
  int k = 1;
  Vector u = sample_uniform_ball(y, r, rng);
  while (run.region.contains(u)) {
    if (++k > budget) throw SamplingBudgetExhausted("no sample left the localization set");
    u = sample_uniform_ball(y, r, rng);
  }
  out.K = k;
  out.u = u;
  out.fhat_u = fhat.value(u);

  const double slack = 1e-12 * std::max(1.0, std::abs(out.fhat_best));
  if (!(out.fhat_u <= out.fhat_best + slack))
    throw CertificateInvariantViolated("certificate point increased f̂; gradient Lipschitz bound too small?");

  const Vector& x0 = run.iterates.front();
  if ((u - x0).norm() > R) {
    out.kind = CertificateCase::EscapedBall;
    return out;
  }
  for (std::size_t t = 0; t < n; ++t) {
    const double linear = values[t] + run.gradients[t].dot(u - run.iterates[t]);
    if (out.fhat_u < linear) {
      out.kind = CertificateCase::NonconvexPair;
      out.v = run.iterates[t];
      out.v_index = t;
      return out;
    }
  }
  throw CertificateScanFailed("sample left the region but no iterate certifies nonconvexity");
}

}  // namespace guiltycut
