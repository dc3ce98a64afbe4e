#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include "json.hpp"

#include "guiltycut/drivers.hpp"

namespace guiltycut {

inline constexpr const char* kTraceSchema = "guiltycut-trace/1";

/// 17 significant digits, enough to round-trip a double.
inline std::string format_real(double v) { return fmt::format("{:.17g}", v); }

inline nlohmann::json to_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline nlohmann::json to_json(const EvalCounters& c) {
  return {{"n0", c.n0}, {"n1", c.n1}, {"n2", c.n2}, {"n3", c.n3}, {"n_center", c.n_center}};
}

inline nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["problem"] = r.problem;
  j["mode"] = to_string(r.mode);
  j["epsilon"] = r.epsilon;
  j["L1"] = r.L1;
  j["L3"] = r.L3;
  j["R"] = r.R;
  j["alpha"] = r.alpha;
  j["seed"] = r.seed;
  j["status"] = r.status;
  j["converged"] = r.converged;
  j["outer_iterations"] = r.outer_iterations;
  j["final_point"] = to_json(r.final_point());
  j["final_f"] = r.iterations.back().f;
  j["final_grad_norm"] = r.final_grad_norm;
  if (r.final_lambda_min)
    j["final_lambda_min"] = *r.final_lambda_min;
  else
    j["final_lambda_min"] = nullptr;
  j["second_order_ok"] = r.second_order_ok;
  j["strict_second_order_ok"] = r.strict_second_order_ok;
  j["required_per_iteration_decrease"] = r.required_per_iteration_decrease;
  j["per_iteration_decrease_ok"] = r.per_iteration_decrease_ok;
  j["delta_observed"] = r.delta_observed;
  j["iteration_bound"] = r.iteration_bound;
  j["iteration_bound_ok"] = r.iteration_bound_ok;
  j["transfer_ok"] = r.transfer_ok;
  j["inner_f_calls"] = r.inner_f_calls;
  j["K_list"] = r.K_list;
  j["K_bar"] = r.K_bar;
  j["counters"] = to_json(r.counters);
  j["wall_seconds"] = r.wall_seconds;
  j["notes"] = r.notes;
  nlohmann::json its = nlohmann::json::array();
  for (const auto& it : r.iterations) {
    nlohmann::json e{{"t", it.t},
                     {"z", to_json(it.z)},
                     {"f", it.f},
                     {"grad_norm", it.grad_norm},
                     {"decrease", it.decrease},
                     {"K", it.K},
                     {"branch", it.branch},
                     {"counters", to_json(it.counters)}};
    if (r.mode == SolverMode::quartic) e["model_decrease"] = it.model_decrease;
    its.push_back(std::move(e));
  }
  j["iterations"] = std::move(its);
  return j;
}

/// One row per outer iteration (row 0 is the start point). Wall time is left
/// out so that equal seeds give byte-identical files.
inline std::string trace_csv(const RunReport& r) {
  std::string out = fmt::format("# schema: {}\n", kTraceSchema);
  out += "t,f,grad_norm,decrease,K,branch,n1,n2,n3\n";
  for (const auto& it : r.iterations) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", it.t, format_real(it.f), format_real(it.grad_norm),
                       format_real(it.decrease), it.K, it.branch, it.counters.n1, it.counters.n2, it.counters.n3);
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw Error("failed writing " + path.string());
}

/// Writes report.json and trace.csv into dir.
inline void write_report(const std::filesystem::path& dir, const RunReport& r) {
  write_text(dir / "report.json", to_json(r).dump(2) + "\n");
  write_text(dir / "trace.csv", trace_csv(r));
}

}  // namespace guiltycut
