#pragma once

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "wvx/fields.hpp"
#include "wvx/mesh.hpp"

namespace wvx {

/// Default tolerance on |modular - 1| at the returned Luxemburg norm.
inline constexpr double kNormModularTol = 1e-10;

struct NormResult {
  double value = 0.0;
  double modular_at_value = 0.0;
  int iterations = 0;
};

/// Weighted variable-exponent modular: sum of w_i |f_i|^{p_i} theta_i over
/// the quadrature nodes.  Overflow propagates as +inf, never a crash.
inline double modular(const Mesh& m, const std::vector<double>& f,
                      const std::vector<double>& p, const std::vector<double>& theta) {
  double s = 0.0;
  for (int i = 0; i < m.node_count(); ++i) {
    const double a = std::abs(f[i]);
    if (a == 0.0) continue;
    s += m.quad_w[i] * std::pow(a, p[i]) * theta[i];
  }
  return s;
}

inline double modular(const GridFunction& f, const ExponentProfile& p, const WeightProfile& w) {
  require_same_mesh(*f.mesh, *p.mesh(), "modular");
  require_same_mesh(*f.mesh, *w.mesh(), "modular");
  return modular(*f.mesh, f.values, p.values(), w.values());
}

namespace detail {

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

/// Luxemburg norm: the lambda > 0 with modular(f/lambda) = 1, located by
/// bisection after bracketing from lambda = max|f|.  The zero function has
/// norm 0.  Throws if the field is degenerate (nonzero only where the weight
/// vanishes) or if bisection cannot meet the modular tolerance.
inline NormResult luxemburg_norm(const Mesh& m, const std::vector<double>& f,
                                 const std::vector<double>& p, const std::vector<double>& theta,
                                 double modular_tol = kNormModularTol) {
  NormResult res;
  const double fmax = detail::max_abs(f);
  if (fmax == 0.0) return res;

  auto rho = [&](double lambda) {
    double s = 0.0;
    for (int i = 0; i < m.node_count(); ++i) {
      const double a = std::abs(f[i]);
      if (a == 0.0) continue;
      s += m.quad_w[i] * std::pow(a / lambda, p[i]) * theta[i];
    }
    return s;
  };

  // Bracket [lo, hi] with rho(lo) >= 1 >= rho(hi).
  double lo = fmax, hi = fmax;
  double r = rho(fmax);
  ++res.iterations;
  if (r > 1.0) {
    for (int k = 0; r > 1.0; ++k) {
      if (k >= 200) throw std::runtime_error("luxemburg_norm: bracket doubling exhausted");
      lo = hi;
      hi *= 2.0;
      r = rho(hi);
      ++res.iterations;
    }
  } else {
    for (int k = 0; r < 1.0; ++k) {
      if (k >= 200)
        throw std::runtime_error("luxemburg_norm: degenerate field (modular never reaches 1)");
      hi = lo;
      lo /= 2.0;
      r = rho(lo);
      ++res.iterations;
    }
    // rho(lo) >= 1 >= rho(hi) by loop exit.
  }

  double mid = hi, rmid = rho(hi);
  for (int k = 0; k < 400; ++k) {
    mid = 0.5 * (lo + hi);
    rmid = rho(mid);
    ++res.iterations;
    const bool tol_met = std::abs(rmid - 1.0) <= modular_tol;
    const bool width_met = hi - lo <= 1e-12 * std::max(mid, 1e-300);
    if (tol_met && width_met) break;
    if (rmid > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  if (std::abs(rmid - 1.0) > modular_tol)
    throw std::runtime_error("luxemburg_norm: bisection failed to meet the modular tolerance");
  res.value = mid;
  res.modular_at_value = rmid;
  return res;
}

inline NormResult luxemburg_norm(const GridFunction& f, const ExponentProfile& p,
                                 const WeightProfile& w, double modular_tol = kNormModularTol) {
  require_same_mesh(*f.mesh, *p.mesh(), "luxemburg_norm");
  require_same_mesh(*f.mesh, *w.mesh(), "luxemburg_norm");
  return luxemburg_norm(*f.mesh, f.values, p.values(), w.values(), modular_tol);
}

/// Norm on the double-weighted Sobolev space: Luxemburg norm of f in
/// (q, theta0) plus Luxemburg norm of |grad f| in (p, theta).  Warns when the
/// exponent ordering q+ < p- fails; callers enforcing it reject earlier.
inline double sobolev_norm(const GridFunction& f, const ExponentProfile& q,
                           const ExponentProfile& p, const WeightProfile& theta0,
                           const WeightProfile& theta) {
  if (!f.trace_zero)
    throw std::invalid_argument("sobolev_norm expects a trace-zero function");
  if (!(q.upper() < p.lower()))
    std::cerr << "wvx: warning: " << standing_violation(q, p,
                                                        2.0 * p.upper() + 1.0)
              << "\n";
  const double part_f = luxemburg_norm(f, q, theta0).value;
  const auto mag = gradient_magnitude(f);
  const double part_g = luxemburg_norm(*f.mesh, mag, p.values(), theta.values()).value;
  return part_f + part_g;
}

/// The equivalent norm on the trace-zero subspace: the gradient term alone.
inline double equivalent_norm(const GridFunction& f, const ExponentProfile& p,
                              const WeightProfile& theta) {
  if (!f.trace_zero)
    throw std::invalid_argument("equivalent_norm expects a trace-zero function");
  const auto mag = gradient_magnitude(f);
  return luxemburg_norm(*f.mesh, mag, p.values(), theta.values()).value;
}

/// Two-sided Hoelder pairing: returns (lhs, rhs) with
///   lhs = integral of |f g|,
///   rhs = 2 * || f theta^{1/p} ||_{p} * || g theta^{-1/p} ||_{p'},
/// both norms unweighted.  lhs <= rhs for admissible inputs.
inline std::pair<double, double> holder_pairing(const GridFunction& f, const GridFunction& g,
                                                const ExponentProfile& p,
                                                const WeightProfile& theta) {
  require_same_mesh(*f.mesh, *g.mesh, "holder_pairing");
  require_same_mesh(*f.mesh, *p.mesh(), "holder_pairing");
  require_same_mesh(*f.mesh, *theta.mesh(), "holder_pairing");
  const Mesh& m = *f.mesh;

  double lhs = 0.0;
  for (int i = 0; i < m.node_count(); ++i)
    lhs += m.quad_w[i] * std::abs(f.values[i] * g.values[i]);

  const ExponentProfile pc = conjugate_exponent(p);
  std::vector<double> a(m.node_count()), b(m.node_count());
  for (int i = 0; i < m.node_count(); ++i) {
    // x * theta^{+-1/p} with the convention 0 * inf = 0.
    const double s = std::pow(theta[i], 1.0 / p[i]);
    a[i] = f.values[i] == 0.0 ? 0.0 : f.values[i] * s;
    b[i] = g.values[i] == 0.0 ? 0.0 : g.values[i] / s;
  }
  const std::vector<double> ones(m.node_count(), 1.0);
  const double na = luxemburg_norm(m, a, p.values(), ones).value;
  const double nb = luxemburg_norm(m, b, pc.values(), ones).value;
  return {lhs, 2.0 * na * nb};
}

}  // namespace wvx
