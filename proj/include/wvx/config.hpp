#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "wvx/problem.hpp"
#include "wvx/solvers.hpp"
#include "wvx/verify.hpp"

namespace wvx {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainConfig {
  int dim = 1;
  std::array<std::array<double, 2>, 2> box{{{0.0, 1.0}, {0.0, 1.0}}};
  std::array<int, 2> n{129, 1};
};

/// A full run description: domain, field expressions, solver and suite
/// parameters.  Field expressions are kept as source strings so the config
/// survives a canonical JSON round-trip byte for byte.
struct RunConfig {
  DomainConfig domain;
  std::string p, q, theta, theta0;         // required field expressions
  std::string theta1, r, t, alpha, beta;   // auxiliary fields, "" = absent
  double lambda = 0.0;                     // 0 = derived default
  SolveConfig solve;
  SuiteConfig suite;
  std::vector<std::string> suites;         // empty = every applicable suite
  std::string output_dir = "out";
};

namespace detail {

using json = nlohmann::json;

inline void require_keys(const json& j, const char* where,
                         std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("key \"") + key + "\" has the wrong type");
  }
}

template <class T>
T get_req(const json& j, const char* key, const char* where) {
  if (!j.contains(key))
    throw ConfigError(std::string(where) + " is missing required key \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("key \"") + key + "\" has the wrong type");
  }
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
  using detail::get_or;
  using detail::get_req;
  RunConfig c;
  detail::require_keys(j, "config",
                       {"domain", "fields", "lambda", "output", "solver", "verify"});

  {
    const auto& d = j.at("domain");
    detail::require_keys(d, "domain", {"dim", "box", "n"});
    c.domain.dim = get_req<int>(d, "dim", "domain");
    if (c.domain.dim != 1 && c.domain.dim != 2)
      throw ConfigError("domain.dim must be 1 or 2");
    const auto box = get_req<std::vector<std::vector<double>>>(d, "box", "domain");
    const auto n = get_req<std::vector<int>>(d, "n", "domain");
    if (static_cast<int>(box.size()) != c.domain.dim)
      throw ConfigError("domain.box must list one [lo, hi] pair per axis");
    if (static_cast<int>(n.size()) != c.domain.dim)
      throw ConfigError("domain.n must list one node count per axis");
    for (int a = 0; a < c.domain.dim; ++a) {
      if (box[a].size() != 2) throw ConfigError("domain.box entries must be [lo, hi]");
      c.domain.box[a] = {box[a][0], box[a][1]};
      c.domain.n[a] = n[a];
    }
    if (c.domain.dim == 1) c.domain.n[1] = 1;
  }

  {
    const auto& f = j.at("fields");
    detail::require_keys(f, "fields",
                         {"p", "q", "theta", "theta0", "theta1", "r", "t", "alpha", "beta"});
    c.p = get_req<std::string>(f, "p", "fields");
    c.q = get_req<std::string>(f, "q", "fields");
    c.theta = get_req<std::string>(f, "theta", "fields");
    c.theta0 = get_req<std::string>(f, "theta0", "fields");
    c.theta1 = get_or<std::string>(f, "theta1", "");
    c.r = get_or<std::string>(f, "r", "");
    c.t = get_or<std::string>(f, "t", "");
    c.alpha = get_or<std::string>(f, "alpha", "");
    c.beta = get_or<std::string>(f, "beta", "");
  }

  c.lambda = get_or<double>(j, "lambda", 0.0);
  if (c.lambda < 0.0) throw ConfigError("lambda must be nonnegative (0 = use the default)");

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    detail::require_keys(s, "solver",
                         {"max_iterations", "gradient_tolerance", "armijo_slope",
                          "backtrack_factor", "initial", "path_points", "seed",
                          "small_sphere_radius", "geometry_samples"});
    c.solve.max_iterations = get_or<int>(s, "max_iterations", c.solve.max_iterations);
    c.solve.gradient_tolerance =
        get_or<double>(s, "gradient_tolerance", c.solve.gradient_tolerance);
    c.solve.armijo_slope = get_or<double>(s, "armijo_slope", c.solve.armijo_slope);
    c.solve.backtrack_factor = get_or<double>(s, "backtrack_factor", c.solve.backtrack_factor);
    c.solve.initial = get_or<std::string>(s, "initial", c.solve.initial);
    c.solve.path_points = get_or<int>(s, "path_points", c.solve.path_points);
    c.solve.seed = get_or<std::uint64_t>(s, "seed", c.solve.seed);
    c.solve.small_sphere_radius =
        get_or<double>(s, "small_sphere_radius", c.solve.small_sphere_radius);
    c.solve.geometry_samples = get_or<int>(s, "geometry_samples", c.solve.geometry_samples);
    if (c.solve.max_iterations < 1) throw ConfigError("solver.max_iterations must be positive");
    if (!(c.solve.gradient_tolerance > 0.0))
      throw ConfigError("solver.gradient_tolerance must be positive");
    if (!(c.solve.backtrack_factor > 0.0 && c.solve.backtrack_factor < 1.0))
      throw ConfigError("solver.backtrack_factor must lie in (0, 1)");
  }

  if (j.contains("verify")) {
    const auto& v = j.at("verify");
    detail::require_keys(v, "verify",
                         {"samples", "seed", "sandwich_slack", "floor_constant",
                          "small_sphere_radius", "refine_drift", "theta0_floor", "suites"});
    c.suite.samples = get_or<int>(v, "samples", c.suite.samples);
    c.suite.seed = get_or<std::uint64_t>(v, "seed", c.suite.seed);
    c.suite.sandwich_slack = get_or<double>(v, "sandwich_slack", c.suite.sandwich_slack);
    c.suite.floor_constant = get_or<double>(v, "floor_constant", c.suite.floor_constant);
    c.suite.small_sphere_radius =
        get_or<double>(v, "small_sphere_radius", c.suite.small_sphere_radius);
    c.suite.refine_drift = get_or<double>(v, "refine_drift", c.suite.refine_drift);
    c.suite.theta0_floor = get_or<double>(v, "theta0_floor", c.suite.theta0_floor);
    c.suites = get_or<std::vector<std::string>>(v, "suites", {});
    if (c.suite.samples < 1) throw ConfigError("verify.samples must be positive");
    for (const auto& s : c.suites) {
      const auto& names = all_suite_names();
      if (std::find(names.begin(), names.end(), s) == names.end())
        throw ConfigError("verify.suites names an unknown suite: " + s);
    }
  }

  if (j.contains("output")) {
    const auto& o = j.at("output");
    detail::require_keys(o, "output", {"dir"});
    c.output_dir = get_or<std::string>(o, "dir", c.output_dir);
  }
  return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  nlohmann::json d;
  d["dim"] = c.domain.dim;
  for (int a = 0; a < c.domain.dim; ++a) {
    d["box"].push_back({c.domain.box[a][0], c.domain.box[a][1]});
    d["n"].push_back(c.domain.n[a]);
  }
  j["domain"] = d;

  nlohmann::json f;
  f["p"] = c.p;
  f["q"] = c.q;
  f["theta"] = c.theta;
  f["theta0"] = c.theta0;
  if (!c.theta1.empty()) f["theta1"] = c.theta1;
  if (!c.r.empty()) f["r"] = c.r;
  if (!c.t.empty()) f["t"] = c.t;
  if (!c.alpha.empty()) f["alpha"] = c.alpha;
  if (!c.beta.empty()) f["beta"] = c.beta;
  j["fields"] = f;

  j["lambda"] = c.lambda;

  nlohmann::json s;
  s["max_iterations"] = c.solve.max_iterations;
  s["gradient_tolerance"] = c.solve.gradient_tolerance;
  s["armijo_slope"] = c.solve.armijo_slope;
  s["backtrack_factor"] = c.solve.backtrack_factor;
  s["initial"] = c.solve.initial;
  s["path_points"] = c.solve.path_points;
  s["seed"] = c.solve.seed;
  s["small_sphere_radius"] = c.solve.small_sphere_radius;
  s["geometry_samples"] = c.solve.geometry_samples;
  j["solver"] = s;

  nlohmann::json v;
  v["samples"] = c.suite.samples;
  v["seed"] = c.suite.seed;
  v["sandwich_slack"] = c.suite.sandwich_slack;
  v["floor_constant"] = c.suite.floor_constant;
  v["small_sphere_radius"] = c.suite.small_sphere_radius;
  v["refine_drift"] = c.suite.refine_drift;
  v["theta0_floor"] = c.suite.theta0_floor;
  v["suites"] = c.suites;
  j["verify"] = v;

  j["output"]["dir"] = c.output_dir;
  return j;
}

inline RunConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Canonical serialization: sorted keys, two-space indent, trailing newline.
inline std::string canonical_config(const RunConfig& c) {
  return config_to_json(c).dump(2) + "\n";
}

namespace detail {

inline FieldExpr parse_field(const std::string& src, const char* name) {
  try {
    return FieldExpr::parse(src);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("field ") + name + ": " + e.what());
  }
}

}  // namespace detail

/// Realizes the configured fields on the configured mesh.  Validation
/// failures (exponent range, weight sign, parse errors) surface as
/// ConfigError naming the offending field.
inline Problem make_problem(const RunConfig& c) {
  MeshPtr mesh = build_mesh(c.domain.dim, c.domain.box, c.domain.n);
  auto exponent = [&](const std::string& src, const char* name) {
    try {
      return ExponentProfile(detail::parse_field(src, name), mesh);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("field ") + name + ": " + e.what());
    }
  };
  auto weight = [&](const std::string& src, const char* name) {
    try {
      return WeightProfile(detail::parse_field(src, name), mesh);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("field ") + name + ": " + e.what());
    }
  };
  Problem pr{mesh, exponent(c.p, "p"), exponent(c.q, "q"), weight(c.theta, "theta"),
             weight(c.theta0, "theta0")};
  if (!c.theta1.empty()) pr.theta1.emplace(weight(c.theta1, "theta1"));
  if (!c.r.empty()) pr.r.emplace(exponent(c.r, "r"));
  if (!c.t.empty()) pr.t.emplace(exponent(c.t, "t"));
  if (!c.alpha.empty()) pr.alpha.emplace(exponent(c.alpha, "alpha"));
  if (!c.beta.empty()) pr.beta.emplace(exponent(c.beta, "beta"));
  pr.lambda = c.lambda;
  return pr;
}

}  // namespace wvx
