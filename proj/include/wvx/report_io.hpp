#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "json.hpp"
#include "wvx/fields.hpp"
#include "wvx/solvers.hpp"
#include "wvx/verify.hpp"

namespace wvx {

// JSON reports must rerun byte-identical under the same config and seed, so
// everything serialized here is deterministic: sorted keys (nlohmann's
// std::map storage), shortest-round-trip doubles, no timestamps, no
// wall-clock durations.  Non-finite values serialize as null.

inline nlohmann::json to_json(const ConditionReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["value"] = r.value;
  j["witness"] = r.witness;
  return j;
}

inline nlohmann::json to_json(const SuiteReport& r) {
  nlohmann::json j;
  j["suite"] = r.suite;
  j["cases"] = r.cases;
  j["failures"] = r.failures;
  j["constants"] = r.constants;
  j["witness"] = r.witness;
  if (!r.sample_series.empty()) j["sample_count"] = r.sample_series.size();
  return j;
}

inline nlohmann::json to_json(const EnergyBreakdown& e) {
  nlohmann::json j;
  j["lambda_part"] = e.lambda_part;
  j["q_part"] = e.q_part;
  j["total"] = e.total;
  return j;
}

inline nlohmann::json to_json(const SolveReport& r) {
  nlohmann::json j;
  j["converged"] = r.converged;
  j["energy"] = to_json(r.energy);
  j["iterations"] = r.iterations;
  j["lambda"] = r.lambda;
  j["message"] = r.message;
  j["residual"] = r.residual;
  double mx = 0.0;
  for (double v : r.solution.values) mx = std::max(mx, std::abs(v));
  j["solution_max_abs"] = mx;
  j["solution_nodes"] = r.solution.values.size();
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

/// Canonical report bytes: sorted keys, two-space indent, trailing newline.
inline std::string report_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "iteration,energy,grad_norm\n";
  char buf[128];
  for (const auto& t : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", t.iteration, t.energy, t.grad_norm);
    out << buf;
  }
}

inline void write_series_csv(const std::string& path, const std::string& header,
                             const std::vector<double>& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "sample," << header << "\n";
  char buf[96];
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, series[i]);
    out << buf;
  }
}

}  // namespace wvx
