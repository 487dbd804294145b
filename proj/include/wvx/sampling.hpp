#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "wvx/mesh.hpp"

namespace wvx {

/// Seeded generator with a platform-independent uniform: doubles are built
/// from the top 53 bits of the engine output, so identical seeds give
/// identical streams everywhere.
struct Rng {
  std::mt19937_64 eng;

  explicit Rng(std::uint64_t seed) : eng(seed) {}

  double unit() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * unit(); }

  int uniform_int(int a, int b) {  // inclusive bounds
    return a + static_cast<int>(eng() % static_cast<std::uint64_t>(b - a + 1));
  }
};

/// Mesh-free description of a random test function: a short sine series plus
/// one smooth bump.  Drawing the description first and sampling it second
/// lets the same function be realized on meshes of different resolution.
struct SampleSpec {
  struct Mode {
    int kx = 1, ky = 1;
    double amp = 0.0;
  };
  std::vector<Mode> modes;
  double bump_amp = 0.0;
  double cx = 0.5, cy = 0.5;
  double sx = 0.15, sy = 0.15;
};

inline SampleSpec draw_sample(Rng& rng, int dim) {
  SampleSpec s;
  const int count = rng.uniform_int(1, 5);
  for (int i = 0; i < count; ++i) {
    SampleSpec::Mode mo;
    mo.kx = rng.uniform_int(1, 5);
    mo.ky = dim == 2 ? rng.uniform_int(1, 5) : 1;
    mo.amp = rng.uniform(-1.0, 1.0);
    s.modes.push_back(mo);
  }
  s.bump_amp = rng.uniform(-1.0, 1.0);
  s.cx = rng.uniform(0.3, 0.7);
  s.sx = rng.uniform(0.08, 0.25);
  if (dim == 2) {
    s.cy = rng.uniform(0.3, 0.7);
    s.sy = rng.uniform(0.08, 0.25);
  }
  return s;
}

/// Samples the spec on a mesh and masks the boundary to an exact zero trace.
inline GridFunction realize(const SampleSpec& s, MeshPtr mesh) {
  GridFunction f(mesh);
  const Mesh& m = *mesh;
  constexpr double pi = 3.14159265358979323846;
  for (int i = 0; i < m.node_count(); ++i) {
    const auto pt = m.point(i);
    const double ux = (pt[0] - m.box[0][0]) / (m.box[0][1] - m.box[0][0]);
    const double uy = m.dim == 2 ? (pt[1] - m.box[1][0]) / (m.box[1][1] - m.box[1][0]) : 0.0;
    double v = 0.0;
    for (const auto& mo : s.modes) {
      double term = mo.amp * std::sin(mo.kx * pi * ux);
      if (m.dim == 2) term *= std::sin(mo.ky * pi * uy);
      v += term;
    }
    double bump = s.bump_amp * std::exp(-((ux - s.cx) / s.sx) * ((ux - s.cx) / s.sx));
    bump *= 4.0 * ux * (1.0 - ux);
    if (m.dim == 2) {
      bump *= std::exp(-((uy - s.cy) / s.sy) * ((uy - s.cy) / s.sy));
      bump *= 4.0 * uy * (1.0 - uy);
    }
    f.values[i] = v + bump;
  }
  f.enforce_zero_trace();
  return f;
}

/// Pure sine mode k (per axis in two dimensions), boundary-masked.
inline GridFunction pure_mode(int k, MeshPtr mesh) {
  SampleSpec s;
  s.modes.push_back({k, k, 1.0});
  s.bump_amp = 0.0;
  return realize(s, mesh);
}

/// Zeroes the `layers` node layers nearest each side, producing a function
/// supported strictly inside the domain; discrete zero-extension identities
/// hold exactly for such samples.
inline void apply_collar(GridFunction& f, int layers) {
  const Mesh& m = *f.mesh;
  for (int iy = 0; iy < m.n[1]; ++iy)
    for (int ix = 0; ix < m.n[0]; ++ix) {
      bool cut = ix < layers || ix >= m.n[0] - layers;
      if (m.dim == 2) cut = cut || iy < layers || iy >= m.n[1] - layers;
      if (cut) f.values[m.index(ix, iy)] = 0.0;
    }
  f.trace_zero = true;
}

}  // namespace wvx
