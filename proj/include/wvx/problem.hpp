#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "wvx/fields.hpp"
#include "wvx/mesh.hpp"

namespace wvx {

/// Raised when a run violates a structural hypothesis (exponent ordering,
/// regime mismatch, missing auxiliary fields).  The CLI maps it to the
/// configuration-error exit code.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Everything a run needs: the mesh, the exponent pair (q, p), the weight
/// pair (theta0, theta), and optional auxiliary fields for the embedding
/// diagnostics.
struct Problem {
  MeshPtr mesh;
  ExponentProfile p;
  ExponentProfile q;
  WeightProfile theta;
  WeightProfile theta0;
  std::optional<WeightProfile> theta1;
  std::optional<ExponentProfile> r;
  std::optional<ExponentProfile> t;
  std::optional<ExponentProfile> alpha;
  std::optional<ExponentProfile> beta;
  double lambda = 0.0;  // 0 = derive a default from the exponents

  /// The coercivity parameter lambda: configured value if positive, else
  /// twice p+; mountain-pass runs need q- < lambda, so their default is
  /// raised to twice q+ when necessary.
  double lambda_or_default(bool mountain_pass) const {
    if (lambda > 0.0) return lambda;
    double v = 2.0 * p.upper();
    if (mountain_pass) v = std::max(v, 2.0 * q.upper());
    return v;
  }
};

/// Same fields re-sampled with the per-axis resolution doubled (n -> 2n-1,
/// halving h exactly).
inline Problem refine(const Problem& pr) {
  const Mesh& m = *pr.mesh;
  std::array<int, 2> n{2 * m.n[0] - 1, m.dim == 2 ? 2 * m.n[1] - 1 : 1};
  MeshPtr fine = build_mesh(m.dim, m.box, n);
  auto opt_e = [&](const std::optional<ExponentProfile>& e) {
    return e ? std::optional<ExponentProfile>(ExponentProfile(e->expr(), fine)) : std::nullopt;
  };
  auto opt_w = [&](const std::optional<WeightProfile>& w) {
    return w ? std::optional<WeightProfile>(WeightProfile(w->expr(), fine)) : std::nullopt;
  };
  return Problem{fine,
                 ExponentProfile(pr.p.expr(), fine),
                 ExponentProfile(pr.q.expr(), fine),
                 WeightProfile(pr.theta.expr(), fine),
                 WeightProfile(pr.theta0.expr(), fine),
                 opt_w(pr.theta1),
                 opt_e(pr.r),
                 opt_e(pr.t),
                 opt_e(pr.alpha),
                 opt_e(pr.beta),
                 pr.lambda};
}

}  // namespace wvx
