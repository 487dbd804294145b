#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wvx/energy.hpp"
#include "wvx/problem.hpp"
#include "wvx/sampling.hpp"
#include "wvx/spaces.hpp"

namespace wvx {

enum class SolveMode { minimize, mountain_pass };

struct SolveConfig {
  SolveMode mode = SolveMode::minimize;
  int max_iterations = 200000;
  double gradient_tolerance = 1e-6;
  double armijo_slope = 1e-4;      // sufficient-decrease parameter
  double backtrack_factor = 0.5;
  std::string initial = "bump";    // "bump" or an expression
  int path_points = 21;            // mountain-pass path resolution
  std::uint64_t seed = 1;
  double small_sphere_radius = 0.01;
  int geometry_samples = 8;
};

struct TracePoint {
  int iteration = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
};

struct SolveReport {
  GridFunction solution;
  EnergyBreakdown energy;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  double lambda = 0.0;
  std::string message;
  std::vector<TracePoint> trace;
};

namespace detail {

inline double w_dot(const Mesh& m, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (int i = 0; i < m.node_count(); ++i) s += m.quad_w[i] * a[i] * b[i];
  return s;
}

inline double inf_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

inline GridFunction axpy(const GridFunction& f, double a, const GridFunction& d) {
  GridFunction out = f;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += a * d.values[i];
  out.trace_zero = f.trace_zero && d.trace_zero;
  return out;
}

// One (1/4, 1/2, 1/4) averaging pass along each axis.  The centered
// gradient stencil is blind to the alternating mesh-frequency mode, so the
// discrete energy owns spurious low passes where one node-parity class
// carries the profile and the other stays near zero; damping that mode out
// of every pull direction keeps the path in the resolved subspace.  The
// pass is second-order accurate on smooth fields and positive definite on
// trace-zero data, so Armijo descent along the damped direction is sound.
inline GridFunction damp_mesh_mode(const GridFunction& g) {
  const Mesh& m = *g.mesh;
  GridFunction out = g;
  for (int axis = 0; axis < m.dim; ++axis) {
    const std::vector<double> src = out.values;
    for_each_line(m, axis, [&](int base, int stride, int len) {
      for (int i = 1; i + 1 < len; ++i)
        out.values[base + i * stride] = 0.25 * src[base + (i - 1) * stride] +
                                        0.5 * src[base + i * stride] +
                                        0.25 * src[base + (i + 1) * stride];
    });
  }
  for (int i = 0; i < m.node_count(); ++i)
    if (m.boundary[i]) out.values[i] = 0.0;
  return out;
}

inline GridFunction initial_guess(const Problem& pr, const SolveConfig& cfg) {
  GridFunction f0(pr.mesh);
  if (cfg.initial == "bump") {
    f0 = pure_mode(1, pr.mesh);
  } else {
    f0 = sample(FieldExpr::parse(cfg.initial), pr.mesh);
    f0.enforce_zero_trace();
  }
  if (inf_norm(f0.values) == 0.0)
    throw PreconditionError("initial guess is identically zero, but 0 is a critical point");
  return f0;
}

}  // namespace detail

/// Energy minimization in the coercive regime (q+ < p-) by descent on the
/// gradient representer with Armijo backtracking; trial steps follow a
/// Barzilai-Borwein rule, so the energy trace stays strictly decreasing
/// while convergence is far faster than fixed-step descent.
inline SolveReport solve_min(const Problem& pr, const SolveConfig& cfg) {
  char msg[200];
  if (!(pr.q.upper() < pr.p.lower())) {
    std::snprintf(msg, sizeof msg,
                  "coercive regime requires q+ < p-: q+ = %.6g, p- = %.6g",
                  pr.q.upper(), pr.p.lower());
    throw PreconditionError(msg);
  }
  const double lambda = pr.lambda_or_default(false);
  if (!(pr.p.upper() < lambda)) {
    std::snprintf(msg, sizeof msg, "requires p+ < lambda: p+ = %.6g, lambda = %.6g",
                  pr.p.upper(), lambda);
    throw PreconditionError(msg);
  }

  SolveReport rep;
  rep.lambda = lambda;
  const Mesh& m = *pr.mesh;
  auto J = [&](const GridFunction& f) {
    return energy(f, pr.p, pr.q, pr.theta, pr.theta0).total;
  };

  GridFunction f = detail::initial_guess(pr, cfg);
  // Scale the start so the q-term dominates: the first dyadic amplitude with
  // negative energy, when one exists in 2^0 .. 2^-40.
  {
    double chosen = 1.0;
    for (int k = 0; k <= 40; ++k) {
      const double t = std::ldexp(1.0, -k);
      GridFunction cand = f;
      for (double& v : cand.values) v *= t;
      if (J(cand) < 0.0) {
        chosen = t;
        break;
      }
    }
    for (double& v : f.values) v *= chosen;
  }

  GridFunction g = energy_gradient(f, pr.p, pr.q, pr.theta, pr.theta0);
  double Jf = J(f);
  double gg = detail::w_dot(m, g.values, g.values);
  double alpha = 1.0 / std::max(1.0, detail::inf_norm(g.values));
  bool stalled = false;

  int iter = 0;
  rep.trace.push_back({0, Jf, detail::inf_norm(g.values)});
  for (; iter < cfg.max_iterations; ++iter) {
    if (detail::inf_norm(g.values) <= cfg.gradient_tolerance) break;

    double a = std::clamp(alpha, 1e-14, 1e12);
    GridFunction fn;
    double Jn = 0.0;
    int bt = 0;
    for (;;) {
      fn = detail::axpy(f, -a, g);
      Jn = J(fn);
      if (Jn <= Jf - cfg.armijo_slope * a * gg) break;
      a *= cfg.backtrack_factor;
      if (++bt > 60) {
        stalled = true;
        break;
      }
    }
    if (stalled) {
      rep.message = "line search stalled";
      break;
    }

    GridFunction gn = energy_gradient(fn, pr.p, pr.q, pr.theta, pr.theta0);
    double ss = 0.0, sy = 0.0;
    for (int i = 0; i < m.node_count(); ++i) {
      const double s = fn.values[i] - f.values[i];
      const double y = gn.values[i] - g.values[i];
      ss += m.quad_w[i] * s * s;
      sy += m.quad_w[i] * s * y;
    }
    alpha = (std::isfinite(sy) && sy > 0.0) ? ss / sy : a * 2.0;

    f = std::move(fn);
    g = std::move(gn);
    Jf = Jn;
    gg = detail::w_dot(m, g.values, g.values);
    rep.trace.push_back({iter + 1, Jf, detail::inf_norm(g.values)});
  }

  // The zero function is always feasible; never return anything worse.
  if (Jf > 0.0) {
    GridFunction zero(pr.mesh);
    zero.trace_zero = true;
    f = std::move(zero);
    rep.message = rep.message.empty()
                      ? "iterate energy stayed positive; returning the trivial minimizer"
                      : rep.message + "; returning the trivial minimizer";
  }

  rep.solution = std::move(f);
  rep.energy = energy(rep.solution, pr.p, pr.q, pr.theta, pr.theta0);
  rep.residual = weak_residual(rep.solution, pr.p, pr.q, pr.theta, pr.theta0);
  rep.iterations = iter;
  rep.converged = rep.residual <= cfg.gradient_tolerance;
  if (!rep.converged && rep.message.empty()) rep.message = "iteration budget exhausted";
  return rep;
}

namespace detail {

/// Central finite-difference application of the energy Hessian at f along v,
/// computed from the gradient representer.
inline GridFunction apply_hessian(const Problem& pr, const GridFunction& f,
                                  const GridFunction& v) {
  const double vn = inf_norm(v.values);
  if (vn == 0.0) {
    GridFunction zero(f.mesh);
    zero.trace_zero = true;
    return zero;
  }
  const double eps = 1e-6 * (1.0 + inf_norm(f.values)) / vn;
  const GridFunction gp =
      energy_gradient(axpy(f, eps, v), pr.p, pr.q, pr.theta, pr.theta0);
  const GridFunction gm =
      energy_gradient(axpy(f, -eps, v), pr.p, pr.q, pr.theta, pr.theta0);
  GridFunction out(f.mesh);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = (gp.values[i] - gm.values[i]) / (2.0 * eps);
  out.trace_zero = true;
  return out;
}

/// Approximately solves H d = -G in the least-squares sense by conjugate
/// gradients on the normal equations, all inner products taken in the
/// quadrature metric.  H is symmetric there, possibly indefinite.
inline GridFunction newton_direction(const Problem& pr, const GridFunction& f,
                                     const GridFunction& G, int max_cg, int& hessian_applies) {
  const Mesh& m = *f.mesh;
  GridFunction d(f.mesh);
  d.trace_zero = true;

  GridFunction b = apply_hessian(pr, f, G);  // H G
  ++hessian_applies;
  for (double& x : b.values) x = -x;         // b = -H G

  GridFunction r = b;                        // r = b - H^2 d, d = 0
  GridFunction p_dir = r;
  double rr = w_dot(m, r.values, r.values);
  const double rr0 = rr;
  for (int it = 0; it < max_cg && rr > 1e-8 * rr0 && rr > 0.0; ++it) {
    GridFunction hp = apply_hessian(pr, f, p_dir);
    GridFunction hhp = apply_hessian(pr, f, hp);
    hessian_applies += 2;
    const double php = w_dot(m, p_dir.values, hhp.values);
    if (!(php > 0.0) || !std::isfinite(php)) break;
    const double step = rr / php;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
      d.values[i] += step * p_dir.values[i];
      r.values[i] -= step * hhp.values[i];
    }
    const double rr_new = w_dot(m, r.values, r.values);
    const double beta = rr_new / rr;
    for (std::size_t i = 0; i < p_dir.values.size(); ++i)
      p_dir.values[i] = r.values[i] + beta * p_dir.values[i];
    rr = rr_new;
  }
  return d;
}

}  // namespace detail

/// Mountain-pass search in the superlinear regime (p+ < q-): verifies the
/// pass geometry, deforms a discrete path from 0 past the energy barrier by
/// pulling its maximal point downhill and re-spacing the path after each
/// pull, until the barrier value stagnates near the pass level; the
/// maximizer is then polished into a critical point with damped Newton
/// steps on the gradient representer.
inline SolveReport solve_mountain_pass(const Problem& pr, const SolveConfig& cfg) {
  char msg[240];
  if (!(pr.p.upper() < pr.q.lower())) {
    std::snprintf(msg, sizeof msg,
                  "mountain-pass regime requires p+ < q-: p+ = %.6g, q- = %.6g",
                  pr.p.upper(), pr.q.lower());
    throw PreconditionError(msg);
  }
  const double lambda = pr.lambda_or_default(true);
  if (!(pr.q.lower() < lambda)) {
    std::snprintf(msg, sizeof msg, "requires q- < lambda: q- = %.6g, lambda = %.6g",
                  pr.q.lower(), lambda);
    throw PreconditionError(msg);
  }

  SolveReport rep;
  rep.lambda = lambda;
  const Mesh& m = *pr.mesh;
  auto J = [&](const GridFunction& f) {
    return energy(f, pr.p, pr.q, pr.theta, pr.theta0).total;
  };
  auto grad = [&](const GridFunction& f) {
    return energy_gradient(f, pr.p, pr.q, pr.theta, pr.theta0);
  };

  // Pass geometry (a): the energy is positive on a small sphere in the
  // equivalent norm.
  Rng rng(cfg.seed);
  for (int s = 0; s < cfg.geometry_samples; ++s) {
    GridFunction phi = realize(draw_sample(rng, m.dim), pr.mesh);
    const double en = equivalent_norm(phi, pr.p, pr.theta);
    if (en == 0.0) continue;
    const double scale = cfg.small_sphere_radius / en;
    for (double& v : phi.values) v *= scale;
    if (!(J(phi) > 0.0)) {
      std::snprintf(msg, sizeof msg,
                    "geometry check failed: energy %.6g <= 0 on the sphere of radius %.3g",
                    J(phi), cfg.small_sphere_radius);
      rep.message = msg;
      rep.solution = GridFunction(pr.mesh);
      rep.solution.trace_zero = true;
      rep.energy = energy(rep.solution, pr.p, pr.q, pr.theta, pr.theta0);
      rep.residual = weak_residual(rep.solution, pr.p, pr.q, pr.theta, pr.theta0);
      return rep;
    }
  }

  // Pass geometry (b): the ray through the initial bump reaches negative
  // energy; its first negative point is the path endpoint.
  GridFunction e = detail::initial_guess(pr, cfg);
  {
    bool found = false;
    for (int k = 0; k <= 60; ++k) {
      if (J(e) < 0.0) {
        found = true;
        break;
      }
      for (double& v : e.values) v *= 2.0;
    }
    if (!found) {
      rep.message = "geometry check failed: energy never becomes negative along the ray";
      rep.solution = GridFunction(pr.mesh);
      rep.solution.trace_zero = true;
      rep.energy = energy(rep.solution, pr.p, pr.q, pr.theta, pr.theta0);
      rep.residual = weak_residual(rep.solution, pr.p, pr.q, pr.theta, pr.theta0);
      return rep;
    }
  }

  // Discrete path from 0 to e, deformed by descent at its maximal point.
  const int npts = std::max(cfg.path_points, 5);
  std::vector<GridFunction> path;
  std::vector<double> path_J(npts);
  std::vector<double> path_alpha(npts, 1.0);
  for (int j = 0; j < npts; ++j) {
    const double tj = static_cast<double>(j) / (npts - 1);
    GridFunction gj(pr.mesh);
    gj.trace_zero = true;
    for (int i = 0; i < m.node_count(); ++i) gj.values[i] = tj * e.values[i];
    path_J[j] = J(gj);
    path.push_back(std::move(gj));
  }

  int iter = 0;
  const int deform_budget = std::max(cfg.max_iterations / 2, 200);
  std::deque<double> barrier_history;
  int jmax = 1;
  for (; iter < deform_budget; ++iter) {
    jmax = 1;
    for (int j = 2; j + 1 < npts; ++j)
      if (path_J[j] > path_J[jmax]) jmax = j;
    const double barrier = path_J[jmax];

    GridFunction g = grad(path[jmax]);
    const double gn = detail::inf_norm(g.values);
    rep.trace.push_back({iter, barrier, gn});
    if (gn <= cfg.gradient_tolerance) break;

    barrier_history.push_back(barrier);
    if (barrier_history.size() > 40) barrier_history.pop_front();
    if (barrier_history.size() == 40 &&
        barrier_history.front() - barrier <= 1e-9 * (1.0 + std::abs(barrier)))
      break;

    const GridFunction d = detail::damp_mesh_mode(g);
    const double gg = detail::w_dot(m, g.values, d.values);
    // Keep each pull local: a displacement beyond the image spacing would
    // put a wild detour into the path, and the re-spacing below would then
    // spread every image along it.
    double total_len = 0.0;
    for (int j = 1; j < npts; ++j) {
      double d2 = 0.0;
      for (int i = 0; i < m.node_count(); ++i) {
        const double dv = path[j].values[i] - path[j - 1].values[i];
        d2 += m.quad_w[i] * dv * dv;
      }
      total_len += std::sqrt(d2);
    }
    const double step_cap =
        0.5 * (total_len / (npts - 1)) /
        std::max(std::sqrt(detail::w_dot(m, d.values, d.values)), 1e-300);
    double a = std::clamp(std::min(path_alpha[jmax], step_cap), 1e-14, 1e12);
    int bt = 0;
    for (;;) {
      GridFunction cand = detail::axpy(path[jmax], -a, d);
      const double Jc = J(cand);
      if (Jc <= barrier - cfg.armijo_slope * a * gg) {
        path[jmax] = std::move(cand);
        path_J[jmax] = Jc;
        path_alpha[jmax] = a / cfg.backtrack_factor;
        break;
      }
      a *= cfg.backtrack_factor;
      if (++bt > 60) break;
    }
    if (bt > 60) break;  // the maximal point cannot be lowered further

    // Redistribute the images to equal chord spacing along the deformed
    // path.  Without this the lowered image slides into a valley while its
    // neighbors stay put, and the discrete path tunnels through the ridge
    // inside one segment.
    {
      std::vector<double> s(npts, 0.0);
      for (int j = 1; j < npts; ++j) {
        double d2 = 0.0;
        for (int i = 0; i < m.node_count(); ++i) {
          const double dv = path[j].values[i] - path[j - 1].values[i];
          d2 += m.quad_w[i] * dv * dv;
        }
        s[j] = s[j - 1] + std::sqrt(d2);
      }
      if (s[npts - 1] > 0.0) {
        std::vector<GridFunction> fresh;
        fresh.reserve(npts);
        fresh.push_back(path[0]);
        int seg = 1;
        for (int j = 1; j + 1 < npts; ++j) {
          const double target = s[npts - 1] * j / (npts - 1.0);
          while (seg + 1 < npts && s[seg] < target) ++seg;
          const double len = std::max(s[seg] - s[seg - 1], 1e-300);
          const double w1 = (s[seg] - target) / len;
          GridFunction gj(pr.mesh);
          gj.trace_zero = true;
          for (int i = 0; i < m.node_count(); ++i)
            gj.values[i] =
                w1 * path[seg - 1].values[i] + (1.0 - w1) * path[seg].values[i];
          fresh.push_back(std::move(gj));
        }
        fresh.push_back(path[npts - 1]);
        path = std::move(fresh);
        for (int j = 0; j < npts; ++j) path_J[j] = J(path[j]);
      }
    }
  }

  // Polish the maximizer into a critical point: damped Newton on G(f) = 0.
  GridFunction f = path[jmax];
  GridFunction G = grad(f);
  double Mv = 0.5 * detail::w_dot(m, G.values, G.values);
  int hessian_applies = 0;
  const int polish_budget = std::max(cfg.max_iterations - iter, 100);
  for (int outer = 0; outer < 80 && hessian_applies < polish_budget; ++outer) {
    const double gn = detail::inf_norm(G.values);
    rep.trace.push_back({iter + outer, J(f), gn});
    if (gn <= cfg.gradient_tolerance) break;

    GridFunction d = detail::newton_direction(pr, f, G, 2000, hessian_applies);
    double eta = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      GridFunction cand = detail::axpy(f, eta, d);
      GridFunction Gc = grad(cand);
      const double Mc = 0.5 * detail::w_dot(m, Gc.values, Gc.values);
      if (Mc < Mv) {
        f = std::move(cand);
        G = std::move(Gc);
        Mv = Mc;
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {
      rep.message = "polish stagnated before reaching the residual tolerance";
      break;
    }
  }

  rep.solution = std::move(f);
  rep.energy = energy(rep.solution, pr.p, pr.q, pr.theta, pr.theta0);
  rep.residual = weak_residual(rep.solution, pr.p, pr.q, pr.theta, pr.theta0);
  rep.iterations = iter;
  const double fn = detail::inf_norm(rep.solution.values);
  rep.converged = rep.residual <= cfg.gradient_tolerance && rep.energy.total > 0.0 && fn > 1e-6;
  if (!rep.converged && rep.message.empty()) {
    if (rep.energy.total <= 0.0 || fn <= 1e-6)
      rep.message = "search collapsed to a trivial state";
    else
      rep.message = "iteration budget exhausted";
  }
  return rep;
}

inline SolveReport solve(const Problem& pr, const SolveConfig& cfg) {
  return cfg.mode == SolveMode::minimize ? solve_min(pr, cfg) : solve_mountain_pass(pr, cfg);
}

}  // namespace wvx
