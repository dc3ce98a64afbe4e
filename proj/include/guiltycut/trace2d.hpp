#pragma once

#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "guiltycut/cutting.hpp"
#include "guiltycut/oracle.hpp"
#include "guiltycut/region.hpp"
#include "guiltycut/report_io.hpp"

namespace guiltycut {

inline constexpr const char* kTrace2dSchema = "guiltycut-trace2d/1";

/// Points worth tracking through the cut sequence: the nine stationary points
/// of the 2-d double well, or the minimizer of the convex quadratic.
inline std::vector<Vector> marker_points(const std::string& problem) {
  std::vector<Vector> pts;
  if (problem == "doublewell2d") {
    for (double a : {-1.0, 0.0, 1.0})
      for (double b : {-1.0, 0.0, 1.0}) pts.push_back((Vector(2) << a, b).finished());
  } else if (problem == "convex_quadratic") {
    pts.push_back(Vector::Zero(2));
  }
  return pts;
}

struct Trace2d {
  CuttingRun run;
  std::vector<Vector> markers;
  /// inside[t][i]: marker i lies in S^(t), t = 0 .. number of cuts
  std::vector<std::vector<bool>> inside;
  std::optional<CertificateOutcome> certificate;
  std::string certificate_error;
  bool certificate_strict = false;  // f(u) < f(v) + ∇f(v).(u - v) re-checked here
};

/// Region after the first t cuts.
inline LocalizationSet region_prefix(const LocalizationSet& s, std::size_t t) {
  LocalizationSet out(s.center0(), s.radius());
  for (std::size_t i = 0; i < t && i < s.num_cuts(); ++i) out.push_cut(s.cuts()[i].anchor, s.cuts()[i].normal);
  return out;
}

/// Runs the cutting loop on f itself (no proximal term) with the given center
/// rule, tracks marker membership for every S^(t) and finishes with the
/// certificate stage at (L1, epshat).
inline Trace2d trace2d(const OracleFunction& f, const std::string& problem, const Vector& x0, int N, double R,
                       const CenterRule& rule, double L1, double epshat, Rng& rng) {
  if (f.dim() != 2) throw ConfigurationError("trace2d needs a 2-d problem");
  Trace2d tr{cutting_plane_method(f, x0, N, R, rule), marker_points(problem), {}, std::nullopt, {}, false};
  for (std::size_t t = 0; t <= tr.run.region.num_cuts(); ++t) {
    const LocalizationSet s = region_prefix(tr.run.region, t);
    std::vector<bool> row;
    for (const auto& p : tr.markers) row.push_back(s.contains(p));
    tr.inside.push_back(std::move(row));
  }
  try {
    tr.certificate = nonconvexity_certificate(f, tr.run, L1, epshat, R, rng);
    if (tr.certificate->v) {
      const Vector& u = tr.certificate->u;
      const Vector& v = *tr.certificate->v;
      tr.certificate_strict = f.eval_value(u) < f.eval_value(v) + f.eval_gradient(v).dot(u - v);
    }
  } catch (const Error& e) {
    tr.certificate_error = e.what();
  }
  return tr;
}

/// Whether the final region excludes every marker.
inline bool final_region_excludes_markers(const Trace2d& tr) {
  for (bool b : tr.inside.back())
    if (b) return false;
  return true;
}

/// Plot-ready CSV with fixed columns record,t,x1,x2,g1,g2,flag:
///   ball         t=0, (x1,x2) = center, g1 = radius
///   cut          t = cut index, (x1,x2) = anchor, (g1,g2) = normal
///   marker       t = region index, (x1,x2) = point, flag = inside S^(t)
///   certificate  t = 0 for x_best, 1 for u, 2 for v; flag = 1 on the row
///                carrying a strict nonconvexity witness
inline std::string trace2d_csv(const Trace2d& tr) {
  std::string out = fmt::format("# schema: {}\n", kTrace2dSchema);
  out += "record,t,x1,x2,g1,g2,flag\n";
  const auto& s = tr.run.region;
  auto row = [&](const char* rec, std::size_t t, const Vector& x, double g1, double g2, int flag) {
    out += fmt::format("{},{},{},{},{},{},{}\n", rec, t, format_real(x(0)), format_real(x(1)), format_real(g1),
                       format_real(g2), flag);
  };
  row("ball", 0, s.center0(), s.radius(), 0.0, 0);
  for (std::size_t t = 0; t < s.num_cuts(); ++t) row("cut", t, s.cuts()[t].anchor, s.cuts()[t].normal(0), s.cuts()[t].normal(1), 0);
  for (std::size_t t = 0; t < tr.inside.size(); ++t)
    for (std::size_t i = 0; i < tr.markers.size(); ++i) row("marker", t, tr.markers[i], 0.0, 0.0, tr.inside[t][i] ? 1 : 0);
  if (tr.certificate) {
    const auto& c = *tr.certificate;
    row("certificate", 0, c.x_best, 0.0, 0.0, 0);
    row("certificate", 1, c.u, 0.0, 0.0, 0);
    if (c.v) row("certificate", 2, *c.v, 0.0, 0.0, tr.certificate_strict ? 1 : 0);
  }
  return out;
}

}  // namespace guiltycut
