#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "wvx/energy.hpp"
#include "wvx/expr.hpp"
#include "wvx/fields.hpp"
#include "wvx/mesh.hpp"
#include "wvx/sampling.hpp"
#include "wvx/spaces.hpp"

using namespace wvx;

namespace {

ExponentProfile exp_profile(const char* src, MeshPtr m) {
  return ExponentProfile(FieldExpr::parse(src), std::move(m));
}
WeightProfile wt_profile(const char* src, MeshPtr m) {
  return WeightProfile(FieldExpr::parse(src), std::move(m));
}

GridFunction hat(MeshPtr m) {
  GridFunction f(m);
  for (int i = 0; i < m->node_count(); ++i)
    f.values[i] = 1.0 - 2.0 * std::abs(m->point(i)[0] - 0.5);
  f.values[0] = f.values[m->node_count() - 1] = 0.0;
  f.trace_zero = true;
  return f;
}

}  // namespace

TEST_CASE("energy of the hat function matches hand quadrature") {
  const int n = 65;
  const double h = 1.0 / (n - 1);
  auto m = build_interval(0.0, 1.0, n);
  auto p = exp_profile("2", m);
  auto q = exp_profile("2", m);
  auto one = wt_profile("1", m);

  GridFunction f = hat(m);
  const auto e = energy(f, p, q, one, one);

  // |grad hat| is exactly 2 at every node but the peak, where it is 0;
  // trapezoid of hat^2 on this grid is 1/3 + 2h^2/3 exactly.
  REQUIRE(e.lambda_part == Catch::Approx(0.5 * (4.0 - 4.0 * h)).margin(1e-14));
  REQUIRE(e.q_part == Catch::Approx(0.5 * (1.0 / 3.0 + 2.0 * h * h / 3.0)).margin(1e-14));
  REQUIRE(e.total == e.lambda_part - e.q_part);

  // Scaling by t multiplies both quadratic parts by t^2.
  GridFunction g = f;
  for (double& v : g.values) v *= 3.0;
  const auto e3 = energy(g, p, q, one, one);
  REQUIRE(e3.lambda_part == Catch::Approx(9.0 * e.lambda_part).epsilon(1e-13));
  REQUIRE(e3.q_part == Catch::Approx(9.0 * e.q_part).epsilon(1e-13));
}

TEST_CASE("sub-quadratic absorption term approaches its continuum value") {
  auto m = build_interval(0.0, 1.0, 257);
  auto p = exp_profile("2", m);
  auto q = exp_profile("1.5", m);
  auto one = wt_profile("1", m);
  const auto e = energy(hat(m), p, q, one, one);
  // integral of hat^{3/2} over (0,1) is 0.4.
  REQUIRE(e.q_part == Catch::Approx(0.4 / 1.5).margin(1e-4));
}

TEST_CASE("lambda_value is the gradient part of the energy") {
  auto m = build_interval(0.0, 1.0, 65);
  auto p = exp_profile("2 + x", m);
  auto q = exp_profile("1.5", m);
  auto theta = wt_profile("1 + x", m);
  auto theta0 = wt_profile("1", m);
  Rng rng(3);
  for (int rep = 0; rep < 5; ++rep) {
    GridFunction f = realize(draw_sample(rng, 1), m);
    const auto e = energy(f, p, q, theta, theta0);
    REQUIRE(lambda_value(f, p, theta) == e.lambda_part);
    REQUIRE(e.total == e.lambda_part - e.q_part);
  }
}

TEST_CASE("gradient representer reproduces the derivative pairing") {
  for (int dim : {1, 2}) {
    auto m = dim == 1 ? build_interval(0.0, 1.0, 65)
                      : build_rectangle(0.0, 1.0, 0.0, 1.0, 17, 17);
    auto p = exp_profile(dim == 1 ? "2 + 0.5*sin(4*x)" : "2 + 0.25*x + 0.25*y", m);
    auto q = exp_profile("1.5", m);
    auto theta = wt_profile("1 + 0.5*x", m);
    auto theta0 = wt_profile("1", m);
    Rng rng(17);
    for (int rep = 0; rep < 5; ++rep) {
      GridFunction f = realize(draw_sample(rng, dim), m);
      GridFunction g = realize(draw_sample(rng, dim), m);
      const GridFunction G = energy_gradient(f, p, q, theta, theta0);
      double lhs = 0.0;
      for (int i = 0; i < m->node_count(); ++i)
        lhs += m->quad_w[i] * G.values[i] * g.values[i];
      const double rhs = derivative_pairing(f, g, p, q, theta, theta0);
      const double scale = std::max(1.0, std::abs(rhs));
      REQUIRE(lhs == Catch::Approx(rhs).margin(1e-11 * scale));
    }
  }
}

TEST_CASE("derivative pairing agrees with central differences of the energy") {
  auto m = build_interval(0.0, 1.0, 65);
  auto p = exp_profile("2.5", m);
  auto q = exp_profile("2", m);
  auto theta = wt_profile("1 + x", m);
  auto theta0 = wt_profile("1", m);
  const double eps = 1e-5;
  Rng rng(29);
  for (int rep = 0; rep < 10; ++rep) {
    GridFunction f = realize(draw_sample(rng, 1), m);
    GridFunction g = realize(draw_sample(rng, 1), m);
    GridFunction fp = f, fm = f;
    for (int i = 0; i < m->node_count(); ++i) {
      fp.values[i] += eps * g.values[i];
      fm.values[i] -= eps * g.values[i];
    }
    const double fd =
        (energy(fp, p, q, theta, theta0).total - energy(fm, p, q, theta, theta0).total) /
        (2.0 * eps);
    const double exact = derivative_pairing(f, g, p, q, theta, theta0);
    const double scale = std::max(std::abs(exact), 1e-3);
    REQUIRE(std::abs(fd - exact) <= 1e-5 * scale);
  }
}

TEST_CASE("weak residual vanishes at zero and is the sup of the representer") {
  auto m = build_interval(0.0, 1.0, 33);
  auto p = exp_profile("2", m);
  auto q = exp_profile("1.5", m);
  auto one = wt_profile("1", m);

  GridFunction zero(m);
  REQUIRE(weak_residual(zero, p, q, one, one) == 0.0);

  GridFunction f = hat(m);
  const GridFunction G = energy_gradient(f, p, q, one, one);
  double sup = 0.0;
  for (int i = 0; i < m->node_count(); ++i)
    if (!m->boundary[i]) sup = std::max(sup, std::abs(G.values[i]));
  REQUIRE(weak_residual(f, p, q, one, one) == sup);
  REQUIRE(sup > 0.0);
}

TEST_CASE("lambda pairing is the derivative pairing without absorption") {
  auto m = build_interval(0.0, 1.0, 65);
  auto p = exp_profile("2 + x", m);
  auto q = exp_profile("1.5", m);
  auto theta = wt_profile("1 + x", m);
  auto no_absorption = wt_profile("0", m);
  Rng rng(41);
  for (int rep = 0; rep < 5; ++rep) {
    GridFunction f = realize(draw_sample(rng, 1), m);
    GridFunction g = realize(draw_sample(rng, 1), m);
    const double with_zero = derivative_pairing(f, g, p, q, theta, no_absorption);
    const double lam = lambda_pairing(f, g, p, theta);
    REQUIRE(lam == Catch::Approx(with_zero).margin(1e-13).epsilon(1e-12));
  }
}

TEST_CASE("the gradient functional is midpoint convex") {
  auto m = build_interval(0.0, 1.0, 65);
  auto p = exp_profile("2 + x", m);
  auto theta = wt_profile("1", m);
  Rng rng(53);
  for (int rep = 0; rep < 10; ++rep) {
    GridFunction f = realize(draw_sample(rng, 1), m);
    GridFunction g = realize(draw_sample(rng, 1), m);
    GridFunction mid(m);
    for (int i = 0; i < m->node_count(); ++i)
      mid.values[i] = 0.5 * (f.values[i] + g.values[i]);
    mid.trace_zero = true;
    const double lhs = lambda_value(mid, p, theta);
    const double rhs = 0.5 * (lambda_value(f, p, theta) + lambda_value(g, p, theta));
    REQUIRE(lhs <= rhs + 1e-12);
  }
}
