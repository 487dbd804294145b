// Command-line front end: config loading, experiment orchestration, report
// emission.  Exit codes: 0 = requested checks pass, 1 = suite failure or
// non-convergence, 2 = configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wvx/wvx.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kLogHolderCap = 10.0;

struct CommonOpts {
  std::string config_path;
  std::string out;
  long long seed = -1;
  int grid = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool config_required = true) {
  auto* c = cmd->add_option("--config", o.config_path, "JSON run configuration");
  if (config_required) c->required();
  cmd->add_option("--seed", o.seed, "override the solver and verify seeds");
  cmd->add_option("--out", o.out, "output directory (default: output.dir from the config)");
  cmd->add_option("--grid", o.grid, "override the node count on every axis");
}

wvx::RunConfig load_config(const CommonOpts& o) {
  wvx::RunConfig c = wvx::load_config_file(o.config_path);
  if (o.seed >= 0) {
    c.solve.seed = static_cast<std::uint64_t>(o.seed);
    c.suite.seed = static_cast<std::uint64_t>(o.seed);
  }
  if (o.grid > 0) {
    c.domain.n[0] = o.grid;
    c.domain.n[1] = c.domain.dim == 2 ? o.grid : 1;
  }
  if (!o.out.empty()) c.output_dir = o.out;
  return c;
}

std::string out_path(const wvx::RunConfig& c, const char* name) {
  fs::create_directories(c.output_dir);
  return (fs::path(c.output_dir) / name).string();
}

void emit_report(const wvx::RunConfig& c, const json& j) {
  wvx::write_text_file(out_path(c, "report.json"), wvx::report_text(j));
}

// ---------------------------------------------------------------------------

int cmd_analyze(const CommonOpts& opts) {
  const wvx::RunConfig cfg = load_config(opts);
  const wvx::Problem pr = wvx::make_problem(cfg);
  std::vector<wvx::ConditionReport> conds;

  {
    wvx::ConditionReport rep;
    rep.name = "exponent_order";
    const bool coercive = pr.q.upper() < pr.p.lower();
    const bool mountain = pr.p.upper() < pr.q.lower();
    const double lam = pr.lambda_or_default(mountain);
    rep.value = lam;
    if (coercive) {
      const std::string v = wvx::standing_violation(pr.q, pr.p, lam);
      rep.pass = v.empty();
      rep.witness = rep.pass ? "coercive order: 1 < q- <= q+ < p- <= p+ < lambda" : v;
    } else if (mountain) {
      rep.pass = pr.q.lower() < lam;
      char buf[160];
      if (rep.pass)
        std::snprintf(buf, sizeof buf, "mountain-pass order: p+ < q-, lambda = %.6g", lam);
      else
        std::snprintf(buf, sizeof buf,
                      "mountain-pass order needs q- < lambda: q- = %.6g, lambda = %.6g",
                      pr.q.lower(), lam);
      rep.witness = buf;
    } else {
      rep.pass = false;
      rep.witness = wvx::standing_violation(pr.q, pr.p, lam) +
                    " (and the mountain-pass order p+ < q- fails as well)";
    }
    conds.push_back(rep);
  }

  conds.push_back(wvx::check_log_holder(pr.p, kLogHolderCap, "p"));
  conds.push_back(wvx::check_log_holder(pr.q, kLogHolderCap, "q"));

  double extent = pr.mesh->box[0][1] - pr.mesh->box[0][0];
  if (pr.mesh->dim == 2)
    extent = std::min(extent, pr.mesh->box[1][1] - pr.mesh->box[1][0]);
  conds.push_back(wvx::check_jump_condition(pr.p, 0.25 * extent, "p"));

  conds.push_back(wvx::check_weight_class(pr.theta, pr.p, "theta"));

  if (pr.theta1 && pr.r && pr.t && pr.alpha) {
    wvx::EmbeddingHypotheses hyp;
    hyp.theta1 = &*pr.theta1;
    hyp.theta0 = &pr.theta0;
    hyp.theta = &pr.theta;
    hyp.alpha = &*pr.alpha;
    hyp.t = &*pr.t;
    hyp.q = &pr.q;
    hyp.p = &pr.p;
    hyp.floor_c = cfg.suite.theta0_floor;
    for (auto& rep : wvx::check_embedding_hypotheses(hyp, *pr.mesh))
      conds.push_back(std::move(rep));

    {
      wvx::ConditionReport rep;
      rep.name = "aux_exponent_order";
      rep.pass = true;
      for (int i = 0; i < pr.mesh->node_count() && rep.pass; ++i) {
        if (pr.mesh->boundary[i]) continue;
        if (!((*pr.t)[i] > 1.0 && (*pr.t)[i] < pr.q[i] && pr.q[i] < pr.p[i])) {
          rep.pass = false;
          char buf[160];
          const auto pt = pr.mesh->point(i);
          std::snprintf(buf, sizeof buf,
                        "1 < t < q < p fails at x=%.6g: t=%.6g q=%.6g p=%.6g", pt[0],
                        (*pr.t)[i], pr.q[i], pr.p[i]);
          rep.witness = buf;
        }
      }
      if (rep.pass) rep.witness = "1 < t < q < p holds at every interior node";
      conds.push_back(rep);
    }

    if (pr.beta) {
      wvx::ConditionReport rep;
      rep.name = "r_below_conjugate_ratio";
      rep.pass = true;
      double worst = std::numeric_limits<double>::infinity();
      for (int i = 0; i < pr.mesh->node_count(); ++i) {
        if (pr.mesh->boundary[i]) continue;
        const double ts = wvx::sobolev_conjugate_value((*pr.t)[i], pr.mesh->dim);
        if (!std::isfinite(ts)) continue;
        const double margin = ts / (*pr.beta)[i] - (*pr.r)[i];
        if (margin < worst) worst = margin;
        if (!(margin > 0.0) && rep.pass) {
          rep.pass = false;
          char buf[160];
          const auto pt = pr.mesh->point(i);
          std::snprintf(buf, sizeof buf,
                        "r < t*/beta fails at x=%.6g: r=%.6g, t*/beta=%.6g", pt[0],
                        (*pr.r)[i], ts / (*pr.beta)[i]);
          rep.witness = buf;
        }
      }
      rep.value = worst;
      if (rep.pass) rep.witness = "r stays below the conjugate ratio t*/beta";
      conds.push_back(rep);
    }
  }

  json j;
  j["kind"] = "analyze";
  bool all_pass = true;
  for (const auto& c : conds) {
    j["conditions"].push_back(wvx::to_json(c));
    all_pass = all_pass && c.pass;
  }
  {
    json e;
    e["p_minus"] = pr.p.lower();
    e["p_plus"] = pr.p.upper();
    e["q_minus"] = pr.q.lower();
    e["q_plus"] = pr.q.upper();
    const wvx::ExponentProfile pc = wvx::conjugate_exponent(pr.p);
    e["p_conjugate_minus"] = pc.lower();
    e["p_conjugate_plus"] = pc.upper();
    const wvx::SobolevConjugate sc = wvx::sobolev_conjugate(pr.p, pr.mesh->dim);
    e["p_sobolev_conjugate_minus"] = sc.lower;
    e["p_sobolev_conjugate_plus"] = sc.upper;
    e["theta_floor"] = pr.theta.floor();
    e["theta0_floor"] = pr.theta0.floor();
    if (pr.theta.floor() > 0.0)
      e["dual_theta_floor"] = wvx::dual_weight(pr.theta, pr.p).floor();
    j["exponents"] = e;
  }
  j["pass"] = all_pass;
  emit_report(cfg, j);

  for (const auto& c : conds)
    std::printf("%-28s %s  %s\n", c.name.c_str(), c.pass ? "[pass]" : "[FAIL]",
                c.witness.c_str());
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_norm(const CommonOpts& opts, const std::string& csv_path) {
  const wvx::RunConfig cfg = load_config(opts);
  const wvx::Problem pr = wvx::make_problem(cfg);

  const std::string violation =
      wvx::standing_violation(pr.q, pr.p, pr.lambda_or_default(false));
  if (!violation.empty()) throw wvx::ConfigError(violation);

  std::ifstream in(csv_path);
  if (!in) throw wvx::ConfigError("cannot open function csv: " + csv_path);
  wvx::GridFunction f = wvx::read_csv(in);
  if (!f.mesh->same_as(*pr.mesh))
    throw wvx::ConfigError("function grid does not match the configured domain");
  f.mesh = pr.mesh;  // share the configured mesh so profile lookups line up

  json j;
  j["kind"] = "norm";
  j["file"] = csv_path;
  j["trace_zero"] = f.trace_zero;
  j["modular_p_theta"] = wvx::modular(f, pr.p, pr.theta);
  const double np = wvx::luxemburg_norm(f, pr.p, pr.theta).value;
  j["luxemburg_p_theta"] = np;
  j["luxemburg_q_theta0"] = wvx::luxemburg_norm(f, pr.q, pr.theta0).value;
  if (np > 0.0) {
    wvx::GridFunction unit = f;
    for (double& v : unit.values) v /= np;
    j["unit_ball_modular"] = wvx::modular(unit, pr.p, pr.theta);
  }
  if (f.trace_zero) {
    j["sobolev_norm"] = wvx::sobolev_norm(f, pr.q, pr.p, pr.theta0, pr.theta);
    j["equivalent_norm"] = wvx::equivalent_norm(f, pr.p, pr.theta);
  }
  emit_report(cfg, j);
  std::printf("%s", wvx::report_text(j).c_str());
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_solve(const CommonOpts& opts, const std::string& mode) {
  wvx::RunConfig cfg = load_config(opts);
  if (mode == "min")
    cfg.solve.mode = wvx::SolveMode::minimize;
  else if (mode == "mp")
    cfg.solve.mode = wvx::SolveMode::mountain_pass;
  else
    throw wvx::ConfigError("solve mode must be min or mp");

  const wvx::Problem pr = wvx::make_problem(cfg);
  const wvx::SolveReport rep = wvx::solve(pr, cfg.solve);

  json j = wvx::to_json(rep);
  j["kind"] = "solve";
  j["mode"] = mode;
  emit_report(cfg, j);
  {
    std::ofstream sol(out_path(cfg, "solution.csv"), std::ios::binary);
    wvx::write_csv(rep.solution, sol);
  }
  wvx::write_trace_csv(out_path(cfg, "trace.csv"), rep.trace);

  std::printf("solve %s: %s  J = %.9g  residual = %.3g  iterations = %d\n", mode.c_str(),
              rep.converged ? "converged" : "NOT CONVERGED", rep.energy.total, rep.residual,
              rep.iterations);
  if (!rep.message.empty()) std::printf("  %s\n", rep.message.c_str());
  return rep.converged ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_verify(const CommonOpts& opts, const std::string& which) {
  const wvx::RunConfig cfg = load_config(opts);
  const wvx::Problem pr = wvx::make_problem(cfg);

  std::vector<wvx::SuiteReport> suites;
  if (which == "all") {
    if (cfg.suites.empty()) {
      suites = wvx::run_all_suites(pr, cfg.suite);
    } else {
      for (const auto& name : cfg.suites)
        suites.push_back(wvx::run_suite(name, pr, cfg.suite));
    }
  } else {
    suites.push_back(wvx::run_suite(which, pr, cfg.suite));
  }

  bool pass = true;
  json j;
  j["kind"] = "verify";
  j["seed"] = cfg.suite.seed;
  j["samples"] = cfg.suite.samples;
  for (const auto& s : suites) {
    j["suites"].push_back(wvx::to_json(s));
    pass = pass && s.failures == 0;
    if (s.suite == "poincare" && !s.sample_series.empty())
      wvx::write_series_csv(out_path(cfg, "poincare_ratios.csv"), "ratio", s.sample_series);
  }
  j["pass"] = pass;
  emit_report(cfg, j);

  for (const auto& s : suites)
    std::printf("%-22s %s  cases=%d failures=%d  %s\n", s.suite.c_str(),
                s.failures == 0 ? "[pass]" : "[FAIL]", s.cases, s.failures,
                s.witness.c_str());
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_report(const CommonOpts& opts, const std::vector<std::string>& paths,
               bool show_config) {
  if (show_config) {
    if (opts.config_path.empty())
      throw wvx::ConfigError("report --show-config needs --config");
    const wvx::RunConfig cfg = wvx::load_config_file(opts.config_path);
    std::printf("%s", wvx::canonical_config(cfg).c_str());
    if (paths.empty()) return 0;
  }

  json merged;
  merged["kind"] = "report";
  bool pass = true;
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) throw wvx::ConfigError("cannot open report: " + p);
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw wvx::ConfigError("report " + p + " is not valid JSON: " + e.what());
    }
    if (doc.contains("pass") && doc["pass"].is_boolean()) pass = pass && doc["pass"].get<bool>();
    if (doc.contains("converged") && doc["converged"].is_boolean())
      pass = pass && doc["converged"].get<bool>();
    merged["reports"].push_back(std::move(doc));
  }
  merged["pass"] = pass;
  const std::string text = wvx::report_text(merged);
  if (!opts.out.empty()) {
    fs::create_directories(opts.out);
    wvx::write_text_file((fs::path(opts.out) / "report.json").string(), text);
  }
  if (!show_config) std::printf("%s", text.c_str());
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted variable-exponent space calculator and verifier"};
  app.require_subcommand(1);

  CommonOpts a_opts, n_opts, s_opts, v_opts, r_opts;
  std::string norm_csv, solve_mode, verify_suite;
  std::vector<std::string> report_paths;
  bool show_config = false;

  auto* analyze = app.add_subcommand("analyze", "check field hypotheses and report bounds");
  add_common(analyze, a_opts);

  auto* norm = app.add_subcommand("norm", "norms and modulars of a grid function csv");
  add_common(norm, n_opts);
  norm->add_option("csv", norm_csv, "grid function csv file")->required();

  auto* solve = app.add_subcommand("solve", "minimize the energy or run the mountain pass");
  add_common(solve, s_opts);
  solve->add_option("mode", solve_mode, "min or mp")->required();

  auto* verify = app.add_subcommand("verify", "run empirical inequality suites");
  add_common(verify, v_opts);
  verify->add_option("suite", verify_suite, "suite name or all")->required();

  auto* report = app.add_subcommand("report", "merge report.json files");
  add_common(report, r_opts, false);
  report->add_option("files", report_paths, "report.json files to merge");
  report->add_flag("--show-config", show_config, "echo the canonical config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(a_opts);
    if (norm->parsed()) return cmd_norm(n_opts, norm_csv);
    if (solve->parsed()) return cmd_solve(s_opts, solve_mode);
    if (verify->parsed()) return cmd_verify(v_opts, verify_suite);
    if (report->parsed()) return cmd_report(r_opts, report_paths, show_config);
  } catch (const wvx::ExprError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
