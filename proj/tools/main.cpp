// guiltycut command-line front end: solve, scaling, trace2d, validate, chernoff.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include "CLI11.hpp"

#include "scripted_doublewell.hpp"
#include "guiltycut/corpus.hpp"
#include "guiltycut/drivers.hpp"
#include "guiltycut/report_io.hpp"
#include "guiltycut/scaling.hpp"
#include "guiltycut/trace2d.hpp"
#include "validation.hpp"

namespace gc = guiltycut;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kBudget = 2, kValidation = 3, kNumerical = 4 };

struct Options {
  std::string problem = "doublewell2d";
  std::uint64_t problem_seed = 0;
  int dim = 2;
  std::vector<double> x0;
  std::string mode = "guarded";
  std::vector<std::string> modes = {"guarded", "gd_baseline"};
  double eps = 1e-3;
  std::vector<double> eps_list = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  std::uint64_t seed = 0;
  std::optional<double> tau;
  std::string center = "analytic";
  int max_outer = 100000;
  double delta = 1e-6;
  std::optional<double> L1, L3, R;
  std::optional<double> time_budget;
  unsigned threads = 1;
  std::string out = "out";
  std::string config;
  // trace2d
  bool scripted = false;
  std::optional<int> cuts;
  double eps_hat = gc::scripted_doublewell::kEpsHat;
  // validate
  std::vector<std::string> suites;
  bool mutate_alpha_sign = false;
  // chernoff
  int runs = 40;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config, "key = value file mirroring the flags")->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "random seed")->envname("GUILTYCUT_SEED");
  app->add_option("--out", o.out, "output directory");
}

void add_problem(CLI::App* app, Options& o) {
  app->add_option("--problem", o.problem, "corpus problem")->check(CLI::IsMember(gc::corpus_names()));
  app->add_option("--problem-seed", o.problem_seed, "seed for random_quartic");
  app->add_option("--dim", o.dim, "dimension for random_quartic / convex_quadratic")->check(CLI::PositiveNumber);
  app->add_option("--x0", o.x0, "start point (default: the problem's conventional start)")->delimiter(',');
}

void add_solver(CLI::App* app, Options& o) {
  app->add_option("--tau", o.tau, "center oracle volume fraction");
  app->add_option("--center", o.center, "center oracle")->check(CLI::IsMember({"analytic", "centroid"}));
  app->add_option("--max-outer", o.max_outer, "outer iteration budget")->check(CLI::PositiveNumber);
  app->add_option("--delta", o.delta, "failure probability for the time budget");
  app->add_option("--L1", o.L1, "override the gradient Lipschitz constant");
  app->add_option("--L3", o.L3, "override the third-derivative Lipschitz constant");
  app->add_option("--R", o.R, "override the trust radius");
  app->add_option("--time-budget", o.time_budget, "nominal wall-clock budget in seconds");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Lines "key = value" name flags without the leading dashes; '#' starts a
// comment and values may be quoted. Flags given on the command line win.
void apply_config(CLI::App* app, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw gc::ConfigurationError("cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw gc::ConfigurationError(fmt::format("{}:{}: expected key = value", path, lineno));
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    CLI::Option* opt = app->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config")
      throw gc::ConfigurationError(fmt::format("{}:{}: unknown key '{}'", path, lineno, key));
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw gc::ConfigurationError(fmt::format("{}:{}: {}", path, lineno, e.what()));
    }
  }
}

gc::CenterOracle center_oracle(const Options& o) {
  gc::CenterOracle c = o.center == "centroid" ? gc::CenterOracle::sampled_centroid() : gc::CenterOracle::analytic();
  if (o.tau) c.tau = *o.tau;
  c.validate();
  return c;
}

gc::SolverConfig solver_config(const Options& o) {
  gc::SolverConfig cfg;
  cfg.epsilon = o.eps;
  cfg.mode = gc::parse_mode(o.mode);
  cfg.seed = o.seed;
  cfg.center = center_oracle(o);
  cfg.max_outer = o.max_outer;
  cfg.delta = o.delta;
  if (o.L1) cfg.L1 = *o.L1;
  if (o.L3) cfg.L3 = *o.L3;
  cfg.R_override = o.R;
  cfg.time_budget_seconds = o.time_budget;
  return cfg;
}

gc::Vector start_point(const Options& o, const gc::OracleFunction& f) {
  if (o.x0.empty()) return gc::default_start(o.problem, f.dim());
  if (static_cast<int>(o.x0.size()) != f.dim())
    throw gc::ConfigurationError(fmt::format("--x0 has {} entries, problem has dimension {}", o.x0.size(), f.dim()));
  return Eigen::Map<const gc::Vector>(o.x0.data(), static_cast<Eigen::Index>(o.x0.size()));
}

int cmd_solve(const Options& o) {
  const auto f = gc::corpus_get(o.problem, o.problem_seed, o.dim);
  const gc::RunReport rep = gc::solve(*f, start_point(o, *f), solver_config(o));
  gc::write_report(o.out, rep);
  fmt::print("{} {} eps={}: {} after {} outer iterations, |grad| = {:.3e}", rep.problem, gc::to_string(rep.mode),
             rep.epsilon, rep.status, rep.outer_iterations, rep.final_grad_norm);
  if (rep.final_lambda_min) fmt::print(", lambda_min = {:.3e}", *rep.final_lambda_min);
  fmt::print("\nwrote {}\n", (fs::path(o.out) / "report.json").string());
  return rep.converged ? kOk : kBudget;
}

std::string cell_dir(const gc::SweepCell& c, std::size_t i) {
  return fmt::format("{}_{:02d}", gc::to_string(c.mode), i);
}

int cmd_scaling(const Options& o) {
  gc::SweepSpec spec;
  spec.problem = o.problem;
  spec.problem_seed = o.problem_seed;
  spec.dim = o.dim;
  spec.epsilons = o.eps_list;
  spec.modes.clear();
  for (const auto& m : o.modes) spec.modes.push_back(gc::parse_mode(m));
  spec.base = solver_config(o);
  spec.threads = o.threads;
  gc::validate_epsilons(spec.epsilons);
  if (spec.epsilons.size() < 4) throw gc::ConfigurationError("scaling needs at least four epsilons");
  if (spec.epsilons.front() / spec.epsilons.back() < 100.0 * (1.0 - 1e-12))
    throw gc::ConfigurationError("epsilon list must span at least two decades");
  if (!o.x0.empty()) {
    const auto f = gc::corpus_get(o.problem, o.problem_seed, o.dim);
    spec.start = start_point(o, *f);
  }

  const auto cells = gc::run_sweep(spec);
  std::string table = fmt::format("# schema: guiltycut-scaling-cells/1\nmode,epsilon,outer_iterations,status,error\n");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (c.report) gc::write_report(fs::path(o.out) / "cells" / cell_dir(c, i), *c.report);
    table += fmt::format("{},{},{},{},\"{}\"\n", gc::to_string(c.mode), gc::format_real(c.epsilon),
                         c.report ? c.report->outer_iterations : -1, c.report ? c.report->status : "failed", c.error);
  }
  gc::write_text(fs::path(o.out) / "scaling_cells.csv", table);

  std::string fits = "# schema: guiltycut-scaling-fit/1\nmode,slope,intercept,r_squared,cells\n";
  bool all_fit = true;
  fmt::print("{:<12} {:>10} {:>10}  counts\n", "mode", "slope", "R^2");
  for (gc::SolverMode m : spec.modes) {
    const auto fit = gc::fit_mode(cells, m);
    if (!fit) {
      all_fit = false;
      fmt::print("{:<12} {:>10} {:>10}  fewer than four completed cells\n", gc::to_string(m), "-", "-");
      continue;
    }
    fits += fmt::format("{},{},{},{},{}\n", gc::to_string(m), gc::format_real(fit->slope),
                        gc::format_real(fit->intercept), gc::format_real(fit->r_squared), fit->epsilons.size());
    fmt::print("{:<12} {:>10.4f} {:>10.4f}  {}\n", gc::to_string(m), fit->slope, fit->r_squared,
               fmt::join(fit->iterations, " "));
  }
  gc::write_text(fs::path(o.out) / "scaling_fit.csv", fits);
  for (const auto& c : cells)
    if (!c.error.empty()) fmt::print(stderr, "cell {} eps={} failed: {}\n", gc::to_string(c.mode), c.epsilon, c.error);
  return all_fit ? kOk : kBudget;
}

gc::Trace2d honest_trace(const Options& o) {
  const auto f = gc::corpus_get(o.problem, o.problem_seed, o.dim);
  if (f->dim() != 2) throw gc::ConfigurationError("trace2d needs a 2-d problem");
  const gc::Vector x0 = o.x0.empty() ? gc::scripted_doublewell::start() : start_point(o, *f);
  gc::Rng rng(o.seed);
  const gc::CenterOracle oracle = center_oracle(o);
  const double R = o.R.value_or(gc::scripted_doublewell::kRadius);
  const double L1 = o.L1.value_or(f->lipschitz_g1());
  const int N = o.cuts.value_or(gc::cut_budget(2, oracle.tau, L1, R, o.eps_hat));
  return gc::trace2d(*f, o.problem, x0, N, R, gc::make_center_rule(oracle, rng), L1, o.eps_hat, rng);
}

int cmd_trace2d(const Options& o) {
  if (o.scripted && o.problem != "doublewell2d")
    throw gc::ConfigurationError("scripted centers are defined for doublewell2d only");
  const gc::Trace2d tr = o.scripted ? gc::scripted_doublewell::scripted_trace(o.seed) : honest_trace(o);
  const fs::path path = fs::path(o.out) / "trace2d.csv";
  gc::write_text(path, gc::trace2d_csv(tr));
  const auto& last = tr.inside.back();
  const auto kept = std::count(last.begin(), last.end(), true);
  fmt::print("{} cuts; final region contains {} of {} markers\n", tr.run.region.num_cuts(), kept, last.size());
  if (tr.certificate)
    fmt::print("certificate: {}{}\n", gc::to_string(tr.certificate->kind),
               tr.certificate->v ? (tr.certificate_strict ? " (strict witness)" : " (witness not strict)") : "");
  else
    fmt::print("certificate: {}\n", tr.certificate_error);
  fmt::print("wrote {}\n", path.string());
  return kOk;
}

int cmd_validate(const Options& o) {
  gc::validation::ValidationOptions vo;
  if (o.seed != 0) vo.seed = o.seed;
  if (o.mutate_alpha_sign) vo.alpha_scale = -1.0;
  for (const auto& s : o.suites) {
    bool known = false;
    for (const auto& e : gc::validation::suites()) known = known || e.name == s;
    if (!known) throw gc::ConfigurationError("unknown suite '" + s + "'");
  }
  std::vector<std::string> failed;
  for (const auto& e : gc::validation::suites()) {
    if (!o.suites.empty() && std::find(o.suites.begin(), o.suites.end(), e.name) == o.suites.end()) continue;
    const auto r = e.run(vo);
    fmt::print("{} {:<16} checks={} failures={} ({:.1f} s)\n", r.passed ? "PASS" : "FAIL", r.name, r.checks,
               r.failures, r.seconds);
    for (const auto& d : r.details) fmt::print("    {}\n", d);
    std::fflush(stdout);
    if (!r.passed) failed.push_back(r.name);
  }
  if (failed.empty()) return kOk;
  fmt::print(stderr, "failing suites: {}\n", fmt::join(failed, " "));
  return kValidation;
}

int cmd_chernoff(const Options& o) {
  if (o.runs < 1) throw gc::ConfigurationError("--runs must be at least 1");
  const auto cs = gc::validation::chernoff_experiment(o.runs, o.eps, o.seed, 1.0);
  std::string kb = "# schema: guiltycut-kbar/1\nrun,kbar\n";
  for (std::size_t i = 0; i < cs.kbar.size(); ++i) kb += fmt::format("{},{}\n", i, gc::format_real(cs.kbar[i]));
  gc::write_text(fs::path(o.out) / "kbar.csv", kb);
  std::string tail = "# schema: guiltycut-kbar-tail/1\ny,empirical,stderr,bound,ok\n";
  bool ok = true;
  fmt::print("{} runs, {} outer iterations\n{:>4} {:>12} {:>12} {:>12}\n", cs.kbar.size(), cs.outer_iterations, "y",
             "P(Kbar>=y)", "stderr", "bound");
  for (double y : {2.0, 3.0, 5.0, 11.0, 21.0}) {
    const auto [p, sigma] = gc::validation::tail_probability(cs.kbar, y);
    const bool row_ok = p <= gc::validation::chernoff_bound(y) + 3.0 * sigma;
    ok = ok && row_ok;
    tail += fmt::format("{},{},{},{},{}\n", y, gc::format_real(p), gc::format_real(sigma),
                        gc::format_real(gc::validation::chernoff_bound(y)), row_ok ? 1 : 0);
    fmt::print("{:>4} {:>12.4g} {:>12.4g} {:>12.4g}\n", y, p, sigma, gc::validation::chernoff_bound(y));
  }
  gc::write_text(fs::path(o.out) / "kbar_tail.csv", tail);
  for (const auto& e : cs.errors) fmt::print(stderr, "{}\n", e);
  return ok && cs.errors.empty() ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cutting-plane solvers for smooth nonconvex problems"};
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve", "run one solver on a corpus problem");
  add_common(solve, o);
  add_problem(solve, o);
  add_solver(solve, o);
  solve->add_option("--mode", o.mode, "guarded | quartic | first_order | gd_baseline");
  solve->add_option("--eps", o.eps, "target gradient norm")->check(CLI::PositiveNumber);

  auto* scaling = app.add_subcommand("scaling", "epsilon sweep with log-log slope fits");
  add_common(scaling, o);
  add_problem(scaling, o);
  add_solver(scaling, o);
  scaling->add_option("--eps-list", o.eps_list, "strictly decreasing epsilons")->delimiter(',');
  scaling->add_option("--mode", o.modes, "modes to sweep")->delimiter(',');
  scaling->add_option("--threads", o.threads, "concurrent sweep cells");

  auto* trace = app.add_subcommand("trace2d", "cut-by-cut trace of a 2-d localization run");
  add_common(trace, o);
  add_problem(trace, o);
  trace->add_flag("--scripted", o.scripted, "use the fixed double-well centers");
  trace->add_option("--tau", o.tau, "center oracle volume fraction");
  trace->add_option("--center", o.center, "center oracle")->check(CLI::IsMember({"analytic", "centroid"}));
  trace->add_option("--R", o.R, "ball radius");
  trace->add_option("--L1", o.L1, "gradient Lipschitz constant for the certificate");
  trace->add_option("--cuts", o.cuts, "number of cuts (default: the cut budget)");
  trace->add_option("--eps-hat", o.eps_hat, "certificate tolerance");

  auto* validate = app.add_subcommand("validate", "run the property suites");
  add_common(validate, o);
  validate->add_option("--suite", o.suites, "run only these suites (repeatable)");
  validate->add_flag("--mutate-alpha-sign", o.mutate_alpha_sign, "flip the sign of the regularization weight");

  auto* chernoff = app.add_subcommand("chernoff", "tail of the mean certificate sample count");
  add_common(chernoff, o);
  chernoff->add_option("--runs", o.runs, "guarded runs");
  chernoff->add_option("--eps", o.eps, "target gradient norm")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    for (CLI::App* sub : {solve, scaling, trace, validate, chernoff})
      if (sub->parsed() && !o.config.empty()) apply_config(sub, o.config);
    if (chernoff->parsed() && chernoff->count("--eps") == 0) o.eps = 1e-2;
    if (scaling->parsed() && scaling->count("--problem") == 0) o.problem = "slow_tail1d";
    if (solve->parsed()) return cmd_solve(o);
    if (scaling->parsed()) return cmd_scaling(o);
    if (trace->parsed()) return cmd_trace2d(o);
    if (validate->parsed()) return cmd_validate(o);
    return cmd_chernoff(o);
  } catch (const gc::RegimeViolation& e) {
    fmt::print(stderr, "regime violation: {}\n", e.what());
    return kConfig;
  } catch (const gc::ConfigurationError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfig;
  } catch (const gc::BudgetError& e) {
    fmt::print(stderr, "budget exhausted: {}\n", e.what());
    return kBudget;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kNumerical;
  }
}
