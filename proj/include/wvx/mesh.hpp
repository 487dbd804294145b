#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wvx {

/// Uniform tensor-product grid over an open box in one or two dimensions.
/// Nodes include the boundary; node (ix, iy) sits at
/// box[a][0] + i*h[a] along each axis and is stored at index iy*n[0] + ix.
///
/// Quadrature is the composite trapezoid rule: per-axis weights h/2 at the
/// two ends and h inside, multiplied across axes.  The weights sum to the
/// box volume.
struct Mesh {
  int dim = 1;
  std::array<std::array<double, 2>, 2> box{{{0.0, 1.0}, {0.0, 1.0}}};
  std::array<int, 2> n{2, 1};  // nodes per axis; n[1] == 1 in one dimension
  std::array<double, 2> h{1.0, 0.0};
  std::vector<double> quad_w;
  std::vector<char> boundary;

  int node_count() const { return n[0] * n[1]; }

  int index(int ix, int iy = 0) const { return iy * n[0] + ix; }

  std::array<double, 2> point(int idx) const {
    const int ix = idx % n[0];
    const int iy = idx / n[0];
    return {box[0][0] + ix * h[0], dim == 2 ? box[1][0] + iy * h[1] : 0.0};
  }

  double volume() const {
    double v = box[0][1] - box[0][0];
    if (dim == 2) v *= box[1][1] - box[1][0];
    return v;
  }

  bool same_as(const Mesh& o) const {
    return dim == o.dim && n == o.n && box[0] == o.box[0] &&
           (dim == 1 || box[1] == o.box[1]);
  }
};

using MeshPtr = std::shared_ptr<const Mesh>;

inline MeshPtr build_mesh(int dim, const std::array<std::array<double, 2>, 2>& box,
                          const std::array<int, 2>& n) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("mesh dimension must be 1 or 2");
  auto m = std::make_shared<Mesh>();
  m->dim = dim;
  m->box = box;
  m->n = n;
  if (dim == 1) {
    m->n[1] = 1;
    m->box[1] = {0.0, 0.0};
  }
  for (int a = 0; a < dim; ++a) {
    if (!(box[a][0] < box[a][1]))
      throw std::invalid_argument("mesh box must have low < high on every axis");
    if (m->n[a] < 3) throw std::invalid_argument("mesh needs at least 3 nodes per axis");
    m->h[a] = (box[a][1] - box[a][0]) / (m->n[a] - 1);
  }
  if (dim == 1) m->h[1] = 0.0;

  const int total = m->node_count();
  m->quad_w.resize(total);
  m->boundary.resize(total);
  auto axis_w = [&](int a, int i) {
    return (i == 0 || i == m->n[a] - 1) ? m->h[a] / 2 : m->h[a];
  };
  for (int iy = 0; iy < m->n[1]; ++iy)
    for (int ix = 0; ix < m->n[0]; ++ix) {
      double w = axis_w(0, ix);
      bool bd = ix == 0 || ix == m->n[0] - 1;
      if (dim == 2) {
        w *= axis_w(1, iy);
        bd = bd || iy == 0 || iy == m->n[1] - 1;
      }
      const int idx = m->index(ix, iy);
      m->quad_w[idx] = w;
      m->boundary[idx] = bd ? 1 : 0;
    }
  return m;
}

inline MeshPtr build_interval(double lo, double hi, int nodes) {
  return build_mesh(1, {{{lo, hi}, {0.0, 0.0}}}, {nodes, 1});
}

inline MeshPtr build_rectangle(double x0, double x1, double y0, double y1, int nx, int ny) {
  return build_mesh(2, {{{x0, x1}, {y0, y1}}}, {nx, ny});
}

/// Nodal samples of a scalar field.  trace_zero marks functions that vanish
/// on every boundary node exactly; extension by zero and the equivalent
/// gradient norm require it.
struct GridFunction {
  MeshPtr mesh;
  std::vector<double> values;
  bool trace_zero = false;

  GridFunction() = default;
  explicit GridFunction(MeshPtr m)
      : mesh(std::move(m)), values(mesh->node_count(), 0.0) {}

  void enforce_zero_trace() {
    for (int i = 0; i < mesh->node_count(); ++i)
      if (mesh->boundary[i]) values[i] = 0.0;
    trace_zero = true;
  }
};

inline void require_same_mesh(const Mesh& a, const Mesh& b, const char* what) {
  if (!a.same_as(b)) throw std::invalid_argument(std::string(what) + ": mesh mismatch");
}

inline double integrate(const Mesh& m, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += m.quad_w[i] * v[i];
  return s;
}

inline double integrate(const GridFunction& f) { return integrate(*f.mesh, f.values); }

namespace detail {

// One-dimensional difference stencil along a grid line: central differences
// inside, one-sided second-order at the two ends.  Exact on quadratics.
template <class Emit>
inline void stencil_row(int i, int len, double h, Emit&& emit) {
  const double inv2h = 1.0 / (2.0 * h);
  if (i == 0) {
    emit(0, -3.0 * inv2h);
    emit(1, 4.0 * inv2h);
    emit(2, -1.0 * inv2h);
  } else if (i == len - 1) {
    emit(len - 1, 3.0 * inv2h);
    emit(len - 2, -4.0 * inv2h);
    emit(len - 3, 1.0 * inv2h);
  } else {
    emit(i + 1, inv2h);
    emit(i - 1, -inv2h);
  }
}

template <class Fn>
inline void for_each_line(const Mesh& m, int axis, Fn&& fn) {
  // Visits every grid line along `axis`; fn(base, stride, len).
  if (axis == 0) {
    for (int iy = 0; iy < m.n[1]; ++iy) fn(m.index(0, iy), 1, m.n[0]);
  } else {
    for (int ix = 0; ix < m.n[0]; ++ix) fn(m.index(ix, 0), m.n[0], m.n[1]);
  }
}

}  // namespace detail

/// Applies the difference operator along `axis` to nodal values.
inline std::vector<double> apply_gradient_axis(const Mesh& m, int axis,
                                               const std::vector<double>& f) {
  std::vector<double> out(f.size(), 0.0);
  detail::for_each_line(m, axis, [&](int base, int stride, int len) {
    for (int i = 0; i < len; ++i) {
      double acc = 0.0;
      detail::stencil_row(i, len, m.h[axis], [&](int j, double c) {
        acc += c * f[base + j * stride];
      });
      out[base + i * stride] = acc;
    }
  });
  return out;
}

/// Transpose of apply_gradient_axis: out_j = sum_i v_i D_ij.  Needed to
/// assemble nodal representers of derivative pairings.
inline std::vector<double> apply_gradient_axis_transpose(const Mesh& m, int axis,
                                                         const std::vector<double>& v) {
  std::vector<double> out(v.size(), 0.0);
  detail::for_each_line(m, axis, [&](int base, int stride, int len) {
    for (int i = 0; i < len; ++i) {
      const double vi = v[base + i * stride];
      if (vi == 0.0) continue;
      detail::stencil_row(i, len, m.h[axis], [&](int j, double c) {
        out[base + j * stride] += c * vi;
      });
    }
  });
  return out;
}

/// Discrete gradient, one component per axis.
inline std::vector<GridFunction> gradient(const GridFunction& f) {
  std::vector<GridFunction> g;
  for (int a = 0; a < f.mesh->dim; ++a) {
    GridFunction c(f.mesh);
    c.values = apply_gradient_axis(*f.mesh, a, f.values);
    g.push_back(std::move(c));
  }
  return g;
}

/// Pointwise Euclidean length of the discrete gradient.
inline std::vector<double> gradient_magnitude(const GridFunction& f) {
  const auto g = gradient(f);
  std::vector<double> mag(f.values.size(), 0.0);
  if (g.size() == 1) {
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(g[0].values[i]);
  } else {
    for (std::size_t i = 0; i < mag.size(); ++i)
      mag[i] = std::hypot(g[0].values[i], g[1].values[i]);
  }
  return mag;
}

/// Zero-extension of a trace-zero function to a strictly larger box whose
/// node lattice contains the original one (the enlargement must be a whole
/// number of cells on every side).
inline GridFunction extend_by_zero(const GridFunction& f,
                                   const std::array<std::array<double, 2>, 2>& bigger) {
  if (!f.trace_zero)
    throw std::invalid_argument("extend_by_zero requires a trace-zero function");
  const Mesh& m = *f.mesh;
  std::array<int, 2> shift{0, 0};
  std::array<int, 2> nn{1, 1};
  for (int a = 0; a < m.dim; ++a) {
    const double lo_pad = m.box[a][0] - bigger[a][0];
    const double hi_pad = bigger[a][1] - m.box[a][1];
    if (!(lo_pad > 0.0 && hi_pad > 0.0))
      throw std::invalid_argument("extension box must strictly contain the mesh box");
    const double k1 = lo_pad / m.h[a];
    const double k2 = hi_pad / m.h[a];
    const auto near_int = [](double v) {
      return std::abs(v - std::nearbyint(v)) <= 1e-9 * std::max(1.0, std::abs(v));
    };
    if (!near_int(k1) || !near_int(k2))
      throw std::invalid_argument("extension box is not commensurate with the grid");
    shift[a] = static_cast<int>(std::nearbyint(k1));
    nn[a] = m.n[a] + shift[a] + static_cast<int>(std::nearbyint(k2));
  }
  auto big = build_mesh(m.dim, bigger, nn);
  GridFunction out(big);
  for (int iy = 0; iy < m.n[1]; ++iy)
    for (int ix = 0; ix < m.n[0]; ++ix)
      out.values[big->index(ix + shift[0], m.dim == 2 ? iy + shift[1] : 0)] =
          f.values[m.index(ix, iy)];
  out.trace_zero = true;
  return out;
}

inline void write_csv(const GridFunction& f, std::ostream& os) {
  const Mesh& m = *f.mesh;
  char buf[160];
  if (m.dim == 1) {
    std::snprintf(buf, sizeof buf, "# wvx d=1 n=%d box=%.17g,%.17g trace_zero=%d\n",
                  m.n[0], m.box[0][0], m.box[0][1], f.trace_zero ? 1 : 0);
    os << buf << "x,value\n";
  } else {
    std::snprintf(buf, sizeof buf,
                  "# wvx d=2 n=%d,%d box=%.17g,%.17g;%.17g,%.17g trace_zero=%d\n",
                  m.n[0], m.n[1], m.box[0][0], m.box[0][1], m.box[1][0], m.box[1][1],
                  f.trace_zero ? 1 : 0);
    os << buf << "x,y,value\n";
  }
  for (int i = 0; i < m.node_count(); ++i) {
    const auto pt = m.point(i);
    if (m.dim == 1)
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", pt[0], f.values[i]);
    else
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", pt[0], pt[1], f.values[i]);
    os << buf;
  }
}

inline GridFunction read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("grid csv: empty stream");

  int dim = 0, tz = 0;
  std::array<int, 2> n{1, 1};
  std::array<std::array<double, 2>, 2> box{{{0, 0}, {0, 0}}};
  {
    int got = std::sscanf(line.c_str(), "# wvx d=1 n=%d box=%lf,%lf trace_zero=%d",
                          &n[0], &box[0][0], &box[0][1], &tz);
    if (got == 4) {
      dim = 1;
    } else {
      got = std::sscanf(line.c_str(),
                        "# wvx d=2 n=%d,%d box=%lf,%lf;%lf,%lf trace_zero=%d",
                        &n[0], &n[1], &box[0][0], &box[0][1], &box[1][0], &box[1][1], &tz);
      if (got == 7) dim = 2;
    }
  }
  if (dim == 0) throw std::runtime_error("grid csv: bad header line");
  if (!std::getline(is, line)) throw std::runtime_error("grid csv: missing column header");

  GridFunction f(build_mesh(dim, box, n));
  const Mesh& m = *f.mesh;
  for (int i = 0; i < m.node_count(); ++i) {
    if (!std::getline(is, line))
      throw std::runtime_error("grid csv: expected " + std::to_string(m.node_count()) +
                               " rows, got " + std::to_string(i));
    double cx = 0, cy = 0, v = 0;
    if (dim == 1) {
      if (std::sscanf(line.c_str(), "%lf,%lf", &cx, &v) != 2)
        throw std::runtime_error("grid csv: bad row " + std::to_string(i));
    } else {
      if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &cx, &cy, &v) != 3)
        throw std::runtime_error("grid csv: bad row " + std::to_string(i));
    }
    const auto pt = m.point(i);
    const double tol = 1e-9 * (1.0 + std::abs(pt[0]) + std::abs(pt[1]));
    if (std::abs(cx - pt[0]) > tol || (dim == 2 && std::abs(cy - pt[1]) > tol))
      throw std::runtime_error("grid csv: row " + std::to_string(i) +
                               " coordinates do not match the header mesh");
    f.values[i] = v;
  }
  f.trace_zero = tz != 0;
  if (f.trace_zero) {
    for (int i = 0; i < m.node_count(); ++i)
      if (m.boundary[i] && f.values[i] != 0.0)
        throw std::runtime_error("grid csv: trace_zero=1 but boundary values are nonzero");
  }
  return f;
}

/// Samples an expression-valued field at every node.
template <class Expr>
inline GridFunction sample(const Expr& e, MeshPtr mesh) {
  GridFunction f(mesh);
  for (int i = 0; i < mesh->node_count(); ++i) {
    const auto pt = mesh->point(i);
    f.values[i] = e.eval(pt.data(), mesh->dim);
  }
  return f;
}

}  // namespace wvx
