#pragma once

#include <cmath>
#include <vector>

#include "wvx/fields.hpp"
#include "wvx/mesh.hpp"

namespace wvx {

/// J(f) split into its two quadratures; total is lambda_part - q_part with
/// no re-association.
struct EnergyBreakdown {
  double lambda_part = 0.0;
  double q_part = 0.0;
  double total = 0.0;
};

namespace detail {

// |v|^{e} with the degenerate-gradient convention 0 at v = 0 (covers e < 0).
inline double pow_or_zero(double v, double e) {
  return v == 0.0 ? 0.0 : std::pow(v, e);
}

}  // namespace detail

/// J(f) = integral of (1/p)|grad f|^p theta - (1/q)|f|^q theta0.
inline EnergyBreakdown energy(const GridFunction& f, const ExponentProfile& p,
                              const ExponentProfile& q, const WeightProfile& theta,
                              const WeightProfile& theta0) {
  require_same_mesh(*f.mesh, *p.mesh(), "energy");
  const Mesh& m = *f.mesh;
  const auto mag = gradient_magnitude(f);
  EnergyBreakdown e;
  for (int i = 0; i < m.node_count(); ++i) {
    e.lambda_part += m.quad_w[i] * detail::pow_or_zero(mag[i], p[i]) * theta[i] / p[i];
    e.q_part +=
        m.quad_w[i] * detail::pow_or_zero(std::abs(f.values[i]), q[i]) * theta0[i] / q[i];
  }
  e.total = e.lambda_part - e.q_part;
  return e;
}

/// Directional derivative <J'(f), g>: the integral of
/// theta |grad f|^{p-2} grad f . grad g - theta0 |f|^{q-2} f g,
/// with |v|^{p-2} v taken as 0 where the gradient vanishes.
inline double derivative_pairing(const GridFunction& f, const GridFunction& g,
                                 const ExponentProfile& p, const ExponentProfile& q,
                                 const WeightProfile& theta, const WeightProfile& theta0) {
  require_same_mesh(*f.mesh, *g.mesh, "derivative_pairing");
  const Mesh& m = *f.mesh;
  const auto gf = gradient(f);
  const auto gg = gradient(g);
  const auto mag = gradient_magnitude(f);
  double s = 0.0;
  for (int i = 0; i < m.node_count(); ++i) {
    double dot = gf[0].values[i] * gg[0].values[i];
    if (m.dim == 2) dot += gf[1].values[i] * gg[1].values[i];
    const double fac = detail::pow_or_zero(mag[i], p[i] - 2.0);
    const double fv = f.values[i];
    const double zo = fv == 0.0 ? 0.0 : std::pow(std::abs(fv), q[i] - 2.0) * fv;
    s += m.quad_w[i] * (theta[i] * fac * dot - theta0[i] * zo * g.values[i]);
  }
  return s;
}

/// Nodal representer G of the derivative in the quadrature inner product:
/// sum_i w_i G_i g_i = <J'(f), g> for every trace-zero g.  Boundary entries
/// are zero.  Assembled by scattering the transposed difference stencils, so
/// the identity holds to rounding.
inline GridFunction energy_gradient(const GridFunction& f, const ExponentProfile& p,
                                    const ExponentProfile& q, const WeightProfile& theta,
                                    const WeightProfile& theta0) {
  require_same_mesh(*f.mesh, *p.mesh(), "energy_gradient");
  const Mesh& m = *f.mesh;
  const auto gf = gradient(f);
  const auto mag = gradient_magnitude(f);

  std::vector<double> c(m.node_count(), 0.0);
  std::vector<double> flux(m.node_count());
  for (int a = 0; a < m.dim; ++a) {
    for (int i = 0; i < m.node_count(); ++i) {
      const double fac = detail::pow_or_zero(mag[i], p[i] - 2.0);
      flux[i] = m.quad_w[i] * theta[i] * fac * gf[a].values[i];
    }
    const auto back = apply_gradient_axis_transpose(m, a, flux);
    for (int i = 0; i < m.node_count(); ++i) c[i] += back[i];
  }
  for (int i = 0; i < m.node_count(); ++i) {
    const double fv = f.values[i];
    const double zo = fv == 0.0 ? 0.0 : std::pow(std::abs(fv), q[i] - 2.0) * fv;
    c[i] -= m.quad_w[i] * theta0[i] * zo;
  }

  GridFunction G(f.mesh);
  for (int i = 0; i < m.node_count(); ++i)
    G.values[i] = m.boundary[i] ? 0.0 : c[i] / m.quad_w[i];
  G.trace_zero = true;
  return G;
}

/// Residual of the weak-form equation: the largest |<J'(f), e_i>| / w_i over
/// interior nodal basis functions, i.e. the sup norm of the gradient
/// representer.
inline double weak_residual(const GridFunction& f, const ExponentProfile& p,
                            const ExponentProfile& q, const WeightProfile& theta,
                            const WeightProfile& theta0) {
  const GridFunction G = energy_gradient(f, p, q, theta, theta0);
  double r = 0.0;
  for (int i = 0; i < f.mesh->node_count(); ++i)
    if (!f.mesh->boundary[i]) r = std::max(r, std::abs(G.values[i]));
  return r;
}

/// The convex gradient part Lambda(f) = integral of (1/p)|grad f|^p theta.
inline double lambda_value(const GridFunction& f, const ExponentProfile& p,
                           const WeightProfile& theta) {
  const Mesh& m = *f.mesh;
  const auto mag = gradient_magnitude(f);
  double s = 0.0;
  for (int i = 0; i < m.node_count(); ++i)
    s += m.quad_w[i] * detail::pow_or_zero(mag[i], p[i]) * theta[i] / p[i];
  return s;
}

/// <Lambda'(f), g>: the gradient term of the derivative pairing alone.
inline double lambda_pairing(const GridFunction& f, const GridFunction& g,
                             const ExponentProfile& p, const WeightProfile& theta) {
  require_same_mesh(*f.mesh, *g.mesh, "lambda_pairing");
  const Mesh& m = *f.mesh;
  const auto gf = gradient(f);
  const auto gg = gradient(g);
  const auto mag = gradient_magnitude(f);
  double s = 0.0;
  for (int i = 0; i < m.node_count(); ++i) {
    double dot = gf[0].values[i] * gg[0].values[i];
    if (m.dim == 2) dot += gf[1].values[i] * gg[1].values[i];
    s += m.quad_w[i] * theta[i] * detail::pow_or_zero(mag[i], p[i] - 2.0) * dot;
  }
  return s;
}

}  // namespace wvx
