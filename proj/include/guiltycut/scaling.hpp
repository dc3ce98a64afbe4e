#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "guiltycut/corpus.hpp"
#include "guiltycut/drivers.hpp"

namespace guiltycut {

/// Least-squares line through (log(1/eps), log(iterations)).
struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> epsilons;
  std::vector<double> iterations;
};

inline ScalingFit fit_scaling(const std::vector<double>& epsilons, const std::vector<double>& iterations) {
  if (epsilons.size() != iterations.size()) throw ConfigurationError("fit needs one count per epsilon");
  if (epsilons.size() < 2) throw ConfigurationError("fit needs at least two points");
  const std::size_t n = epsilons.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(epsilons[i] > 0.0) || !(iterations[i] > 0.0)) throw ConfigurationError("fit needs positive data");
    x[i] = std::log(1.0 / epsilons[i]);
    y[i] = std::log(iterations[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigurationError("fit needs at least two distinct epsilons");
  ScalingFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // all counts equal: the line is exact
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  fit.epsilons = epsilons;
  fit.iterations = iterations;
  return fit;
}

struct SweepCell {
  double epsilon = 0.0;
  SolverMode mode = SolverMode::guarded;
  std::optional<RunReport> report;
  std::string error;  // empty on success
};

struct SweepSpec {
  std::string problem = "slow_tail1d";
  std::uint64_t problem_seed = 0;
  int dim = 2;
  std::optional<Vector> start;
  std::vector<double> epsilons = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  std::vector<SolverMode> modes = {SolverMode::guarded, SolverMode::gd_baseline};
  SolverConfig base;
  unsigned threads = 1;
};

inline void validate_epsilons(const std::vector<double>& eps) {
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw ConfigurationError("epsilons must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw ConfigurationError("epsilon list must be strictly decreasing");
  }
}

/// Runs every (mode, eps) cell; each cell builds its own problem instance so
/// counters stay per-run. Cells that throw are recorded as failed.
inline std::vector<SweepCell> run_sweep(const SweepSpec& spec) {
  validate_epsilons(spec.epsilons);
  std::vector<SweepCell> cells;
  for (SolverMode m : spec.modes)
    for (double e : spec.epsilons) cells.push_back({e, m, std::nullopt, {}});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      SweepCell& cell = cells[i];
      try {
        const auto f = corpus_get(spec.problem, spec.problem_seed, spec.dim);
        SolverConfig cfg = spec.base;
        cfg.epsilon = cell.epsilon;
        cfg.mode = cell.mode;
        const Vector z0 = spec.start ? *spec.start : default_start(spec.problem, f->dim());
        cell.report = solve(*f, z0, cfg);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return cells;
}

/// Fit for one mode over its completed cells; needs at least four.
inline std::optional<ScalingFit> fit_mode(const std::vector<SweepCell>& cells, SolverMode mode) {
  std::vector<double> eps, its;
  for (const auto& c : cells) {
    if (c.mode != mode || !c.report) continue;
    eps.push_back(c.epsilon);
    its.push_back(c.report->outer_iterations);
  }
  if (eps.size() < 4) return std::nullopt;
  return fit_scaling(eps, its);
}

}  // namespace guiltycut
