#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wvx/expr.hpp"
#include "wvx/mesh.hpp"

namespace wvx {

/// Outcome of a single hypothesis check: pass/fail, a human-readable witness
/// for the worst case seen, and the estimated constant or margin.
struct ConditionReport {
  std::string name;
  bool pass = false;
  std::string witness;
  double value = 0.0;
};

namespace detail {

inline std::string fmt_point(const std::array<double, 2>& pt, int dim) {
  char buf[80];
  if (dim == 1)
    std::snprintf(buf, sizeof buf, "x=%.6g", pt[0]);
  else
    std::snprintf(buf, sizeof buf, "(x,y)=(%.6g,%.6g)", pt[0], pt[1]);
  return buf;
}

// Bounds taken over interior nodes: the standing assumptions are bounds over
// the open domain, and closure nodes would reject admissible fields such as
// 1+x on (0,1).
inline std::pair<double, double> interior_bounds(const Mesh& m, const std::vector<double>& v) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m.node_count(); ++i) {
    if (m.boundary[i]) continue;
    lo = std::min(lo, v[i]);
    hi = std::max(hi, v[i]);
  }
  return {lo, hi};
}

}  // namespace detail

/// Variable exponent sampled on a mesh.  Invariant: 1 < lower() <= upper() < inf,
/// with the bounds taken over interior nodes.
class ExponentProfile {
 public:
  ExponentProfile(FieldExpr e, MeshPtr mesh)
      : ExponentProfile(std::move(e), std::move(mesh), {}, true) {}

  /// Builds a profile from precomputed nodal values (conjugates and other
  /// pointwise-derived exponents); the expression is kept for re-sampling.
  static ExponentProfile from_values(FieldExpr e, MeshPtr mesh, std::vector<double> values) {
    return ExponentProfile(std::move(e), std::move(mesh), std::move(values), false);
  }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }
  const FieldExpr& expr() const { return expr_; }
  const MeshPtr& mesh() const { return mesh_; }

 private:
  ExponentProfile(FieldExpr e, MeshPtr mesh, std::vector<double> values, bool resample)
      : expr_(std::move(e)), mesh_(std::move(mesh)), values_(std::move(values)) {
    if (resample) {
      values_.resize(mesh_->node_count());
      for (int i = 0; i < mesh_->node_count(); ++i) {
        const auto pt = mesh_->point(i);
        values_[i] = expr_.eval(pt.data(), mesh_->dim);
      }
    }
    for (double v : values_)
      if (std::isnan(v))
        throw std::domain_error("exponent out of class: NaN value on the mesh");
    std::tie(lower_, upper_) = detail::interior_bounds(*mesh_, values_);
    if (!(lower_ > 1.0))
      throw std::domain_error("exponent out of class: inf over the domain is " +
                              std::to_string(lower_) + " but must exceed 1");
    if (!std::isfinite(upper_))
      throw std::domain_error("exponent out of class: sup over the domain is not finite");
  }

  FieldExpr expr_;
  MeshPtr mesh_;
  std::vector<double> values_;
  double lower_ = 0.0, upper_ = 0.0;
};

/// Returns (inf, sup) of an exponent expression over the interior nodes,
/// rejecting exponents outside the admissible class.
inline std::pair<double, double> exponent_bounds(const FieldExpr& e, MeshPtr mesh) {
  ExponentProfile p(e, std::move(mesh));
  return {p.lower(), p.upper()};
}

/// Weight sampled on a mesh.  Values must be nonnegative; the recorded floor
/// is the minimum over interior nodes.  Boundary values of derived weights
/// may be +inf (they multiply vanishing traces in every quadrature).
class WeightProfile {
 public:
  WeightProfile(FieldExpr e, MeshPtr mesh)
      : WeightProfile(std::move(e), std::move(mesh), {}, true) {}

  static WeightProfile from_values(FieldExpr e, MeshPtr mesh, std::vector<double> values) {
    return WeightProfile(std::move(e), std::move(mesh), std::move(values), false);
  }

  double floor() const { return floor_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }
  const FieldExpr& expr() const { return expr_; }
  const MeshPtr& mesh() const { return mesh_; }

 private:
  WeightProfile(FieldExpr e, MeshPtr mesh, std::vector<double> values, bool resample)
      : expr_(std::move(e)), mesh_(std::move(mesh)), values_(std::move(values)) {
    if (resample) {
      values_.resize(mesh_->node_count());
      for (int i = 0; i < mesh_->node_count(); ++i) {
        const auto pt = mesh_->point(i);
        values_[i] = expr_.eval(pt.data(), mesh_->dim);
      }
    }
    for (int i = 0; i < mesh_->node_count(); ++i) {
      const double v = values_[i];
      if (std::isnan(v) || v < 0.0)
        throw std::domain_error("weight must be nonnegative on the mesh");
      if (!mesh_->boundary[i] && !std::isfinite(v) && resample)
        throw std::domain_error("weight must be finite at interior nodes");
    }
    floor_ = detail::interior_bounds(*mesh_, values_).first;
  }

  FieldExpr expr_;
  MeshPtr mesh_;
  std::vector<double> values_;
  double floor_ = 0.0;
};

/// Pointwise conjugate exponent p/(p-1).
inline ExponentProfile conjugate_exponent(const ExponentProfile& p) {
  std::vector<double> v(p.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = p[i] / (p[i] - 1.0);
  FieldExpr e = p.expr() / (p.expr() - FieldExpr::constant(1.0));
  return ExponentProfile::from_values(std::move(e), p.mesh(), std::move(v));
}

/// Dual weight theta^(-1/(p-1)); requires a strictly positive weight floor.
inline WeightProfile dual_weight(const WeightProfile& w, const ExponentProfile& p) {
  require_same_mesh(*w.mesh(), *p.mesh(), "dual_weight");
  if (!(w.floor() > 0.0))
    throw std::domain_error("dual_weight requires a weight with positive interior floor");
  std::vector<double> v(w.values().size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::pow(w[i], -1.0 / (p[i] - 1.0));
  FieldExpr e = FieldExpr::pow(
      w.expr(), -(FieldExpr::constant(1.0) / (p.expr() - FieldExpr::constant(1.0))));
  return WeightProfile::from_values(std::move(e), w.mesh(), std::move(v));
}

inline double sobolev_conjugate_value(double p, int d) {
  return p < static_cast<double>(d) ? d * p / (d - p)
                                    : std::numeric_limits<double>::infinity();
}

/// Pointwise Sobolev conjugate d*p/(d-p), +inf wherever p >= d.  The ambient
/// dimension d is a free parameter, independent of the mesh dimension.
struct SobolevConjugate {
  std::vector<double> values;
  double lower = 0.0;
  double upper = 0.0;
};

inline SobolevConjugate sobolev_conjugate(const ExponentProfile& p, int d) {
  SobolevConjugate s;
  s.values.resize(p.values().size());
  for (std::size_t i = 0; i < s.values.size(); ++i)
    s.values[i] = sobolev_conjugate_value(p[i], d);
  std::tie(s.lower, s.upper) = detail::interior_bounds(*p.mesh(), s.values);
  return s;
}

/// Empty when 1 < q- <= q+ < p- <= p+ < lambda holds; otherwise a message
/// naming the violated ordering.
inline std::string standing_violation(const ExponentProfile& q, const ExponentProfile& p,
                                      double lambda) {
  char buf[160];
  if (!(q.upper() < p.lower())) {
    std::snprintf(buf, sizeof buf,
                  "standing assumption 1 < q- <= q+ < p- <= p+ violated: q+ = %.6g, p- = %.6g",
                  q.upper(), p.lower());
    return buf;
  }
  if (!(p.upper() < lambda)) {
    std::snprintf(buf, sizeof buf,
                  "standing assumption p+ < lambda violated: p+ = %.6g, lambda = %.6g",
                  p.upper(), lambda);
    return buf;
  }
  return {};
}

/// Log-Hoelder modulus estimate: the largest |p(x)-p(y)| * (-ln|x-y|) over
/// node pairs with 0 < |x-y| <= 1/2.  Pass iff the estimate stays below cap.
inline ConditionReport check_log_holder(const ExponentProfile& p, double cap,
                                        const std::string& label = "p") {
  const Mesh& m = *p.mesh();
  ConditionReport rep;
  rep.name = "log_holder(" + label + ")";
  double worst = -1.0;
  int wi = -1, wj = -1;
  const int total = m.node_count();
  for (int i = 0; i < total; ++i) {
    const auto a = m.point(i);
    for (int j = i + 1; j < total; ++j) {
      const auto b = m.point(j);
      const double dist = std::hypot(a[0] - b[0], a[1] - b[1]);
      if (dist <= 0.0 || dist > 0.5) continue;
      const double c = std::abs(p[i] - p[j]) * (-std::log(dist));
      if (c > worst) {
        worst = c;
        wi = i;
        wj = j;
      }
    }
  }
  rep.value = std::max(worst, 0.0);
  rep.pass = rep.value <= cap;
  if (wi >= 0)
    rep.witness = "pair " + detail::fmt_point(m.point(wi), m.dim) + " / " +
                  detail::fmt_point(m.point(wj), m.dim);
  else
    rep.witness = "no admissible node pairs";
  return rep;
}

/// Ball-wise exponent jump condition with radius r: on every node-centred
/// ball either inf p >= d or sup p stays below the Sobolev conjugate of
/// inf p.  value is the smallest margin over all balls (negative = violated).
inline ConditionReport check_jump_condition(const ExponentProfile& p, double r,
                                            const std::string& label = "p") {
  const Mesh& m = *p.mesh();
  const double d = static_cast<double>(m.dim);
  ConditionReport rep;
  rep.name = "jump_condition(" + label + ")";
  double worst_margin = std::numeric_limits<double>::infinity();
  int worst_node = -1;
  double worst_lo = 0, worst_hi = 0;
  const int total = m.node_count();
  for (int i = 0; i < total; ++i) {
    const auto c = m.point(i);
    double lo = p[i], hi = p[i];
    for (int j = 0; j < total; ++j) {
      const auto b = m.point(j);
      if (std::hypot(c[0] - b[0], c[1] - b[1]) > r) continue;
      lo = std::min(lo, p[j]);
      hi = std::max(hi, p[j]);
    }
    const double margin = lo >= d ? lo - d : d * lo / (d - lo) - hi;
    if (margin < worst_margin) {
      worst_margin = margin;
      worst_node = i;
      worst_lo = lo;
      worst_hi = hi;
    }
  }
  rep.value = worst_margin;
  rep.pass = worst_margin >= 0.0;
  if (worst_node >= 0) {
    char buf[200];
    const double pstar = sobolev_conjugate_value(worst_lo, m.dim);
    std::snprintf(buf, sizeof buf, "ball at %s: inf p=%.6g, sup p=%.6g, conjugate=%s",
                  detail::fmt_point(m.point(worst_node), m.dim).c_str(), worst_lo, worst_hi,
                  std::isfinite(pstar) ? std::to_string(pstar).c_str() : "inf");
    rep.witness = buf;
  }
  return rep;
}

namespace detail {

/// Composite trapezoid quadrature of a callable over a sub-box.
template <class Fn>
inline double box_quadrature(int dim, const std::array<std::array<double, 2>, 2>& box,
                             int nodes_per_axis, Fn&& fn) {
  const int nx = nodes_per_axis;
  const double hx = (box[0][1] - box[0][0]) / (nx - 1);
  double total = 0.0;
  if (dim == 1) {
    for (int i = 0; i < nx; ++i) {
      const double w = (i == 0 || i == nx - 1) ? hx / 2 : hx;
      total += w * fn(box[0][0] + i * hx, 0.0);
    }
  } else {
    const int ny = nodes_per_axis;
    const double hy = (box[1][1] - box[1][0]) / (ny - 1);
    for (int j = 0; j < ny; ++j) {
      const double wy = (j == 0 || j == ny - 1) ? hy / 2 : hy;
      for (int i = 0; i < nx; ++i) {
        const double wx = (i == 0 || i == nx - 1) ? hx / 2 : hx;
        total += wx * wy * fn(box[0][0] + i * hx, box[1][0] + j * hy);
      }
    }
  }
  return total;
}

}  // namespace detail

struct WeightClassOptions {
  int cover_levels = 3;      // nested compact sub-boxes approaching the boundary
  double growth_cap = 1.5;   // max allowed ratio under 4x quadrature refinement
  int resolution = 0;        // nodes per axis for sub-box quadrature; 0 = from mesh
};

/// Membership of theta in the weight class for p: theta^(-1/(p-1)) must be
/// integrable on compact sub-boxes.  Each level-j box shrinks the domain by a
/// dyadic margin; a 4x refinement re-check guards against spurious
/// convergence near a non-integrable singularity.
inline ConditionReport check_weight_class(const WeightProfile& w, const ExponentProfile& p,
                                          const std::string& label = "theta",
                                          const WeightClassOptions& opts = {}) {
  require_same_mesh(*w.mesh(), *p.mesh(), "check_weight_class");
  const Mesh& m = *w.mesh();
  ConditionReport rep;
  rep.name = "weight_class(" + label + ")";
  rep.pass = true;

  auto integrand = [&](double x, double y) {
    const double pt[2] = {x, y};
    const double pv = p.expr().eval(pt, m.dim);
    if (!(pv > 1.0)) return std::numeric_limits<double>::infinity();
    const double wv = w.expr().eval(pt, m.dim);
    return std::pow(wv, -1.0 / (pv - 1.0));
  };

  const int base_res = opts.resolution > 0 ? opts.resolution : std::max(m.n[0], m.n[1]);
  double worst = 0.0;
  for (int level = 1; level <= opts.cover_levels && rep.pass; ++level) {
    std::array<std::array<double, 2>, 2> sub = m.box;
    for (int a = 0; a < m.dim; ++a) {
      const double margin = (m.box[a][1] - m.box[a][0]) * std::pow(2.0, -(level + 2));
      sub[a][0] += margin;
      sub[a][1] -= margin;
    }
    const double coarse = detail::box_quadrature(m.dim, sub, base_res, integrand);
    const double fine = detail::box_quadrature(m.dim, sub, 4 * base_res, integrand);
    char buf[200];
    if (!std::isfinite(coarse) || !std::isfinite(fine)) {
      rep.pass = false;
      std::snprintf(buf, sizeof buf, "level-%d sub-box quadrature diverges", level);
      rep.witness = buf;
      break;
    }
    if (fine > opts.growth_cap * std::max(coarse, 1e-300)) {
      rep.pass = false;
      std::snprintf(buf, sizeof buf,
                    "level-%d sub-box quadrature grows %.3gx under refinement", level,
                    fine / coarse);
      rep.witness = buf;
      break;
    }
    worst = std::max(worst, fine);
  }
  rep.value = worst;
  if (rep.pass) rep.witness = "dual-power quadrature bounded on all cover levels";
  return rep;
}

/// Auxiliary fields for the compact-embedding hypotheses.
struct EmbeddingHypotheses {
  const WeightProfile* theta1 = nullptr;
  const WeightProfile* theta0 = nullptr;
  const WeightProfile* theta = nullptr;
  const ExponentProfile* alpha = nullptr;
  const ExponentProfile* t = nullptr;
  const ExponentProfile* q = nullptr;
  const ExponentProfile* p = nullptr;
  double floor_c = 0.0;
};

/// The three integrability/positivity hypotheses behind the compact
/// embedding: (theta1 in the alpha-modular class), (dual powers of theta0
/// and theta integrable), (theta0 bounded below).
inline std::vector<ConditionReport> check_embedding_hypotheses(const EmbeddingHypotheses& hyp,
                                                               const Mesh& m) {
  if (!hyp.theta1 || !hyp.theta0 || !hyp.theta || !hyp.alpha || !hyp.t || !hyp.q || !hyp.p)
    throw std::invalid_argument("embedding hypotheses need theta1, theta0, theta, alpha, t, q, p");
  std::vector<ConditionReport> out;
  char buf[200];

  {
    ConditionReport rep;
    rep.name = "theta1_alpha_integrable";
    double s = 0.0;
    for (int i = 0; i < m.node_count(); ++i)
      s += m.quad_w[i] * std::pow((*hyp.theta1)[i], (*hyp.alpha)[i]);
    rep.value = s;
    rep.pass = std::isfinite(s);
    std::snprintf(buf, sizeof buf, "alpha-modular of theta1 = %.6g", s);
    rep.witness = buf;
    out.push_back(rep);
  }

  {
    ConditionReport rep;
    rep.name = "dual_power_integrable";
    rep.pass = true;
    double worst = 0.0;
    for (int i = 0; i < m.node_count() && rep.pass; ++i) {
      const double tv = (*hyp.t)[i], qv = (*hyp.q)[i], pv = (*hyp.p)[i];
      if (!(1.0 < tv && tv < qv && qv < pv)) {
        rep.pass = false;
        std::snprintf(buf, sizeof buf, "ordering 1 < t < q < p fails at %s: t=%.6g q=%.6g p=%.6g",
                      detail::fmt_point(m.point(i), m.dim).c_str(), tv, qv, pv);
        rep.witness = buf;
      }
    }
    if (rep.pass) {
      double s0 = 0.0, s1 = 0.0;
      for (int i = 0; i < m.node_count(); ++i) {
        const double tv = (*hyp.t)[i];
        s0 += m.quad_w[i] * std::pow((*hyp.theta0)[i], -tv / ((*hyp.q)[i] - tv));
        s1 += m.quad_w[i] * std::pow((*hyp.theta)[i], -tv / ((*hyp.p)[i] - tv));
      }
      worst = std::max(s0, s1);
      rep.pass = std::isfinite(s0) && std::isfinite(s1);
      std::snprintf(buf, sizeof buf, "dual-power integrals %.6g (theta0) and %.6g (theta)", s0, s1);
      rep.witness = buf;
    }
    rep.value = worst;
    out.push_back(rep);
  }

  {
    ConditionReport rep;
    rep.name = "theta0_floor";
    rep.value = hyp.theta0->floor();
    rep.pass = hyp.floor_c > 0.0 && rep.value >= hyp.floor_c;
    std::snprintf(buf, sizeof buf, "interior floor of theta0 = %.6g, required >= %.6g",
                  rep.value, hyp.floor_c);
    rep.witness = buf;
    out.push_back(rep);
  }
  return out;
}

}  // namespace wvx
