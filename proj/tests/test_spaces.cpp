#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

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
}  // namespace

TEST_CASE("constant exponents reduce to the classical weighted norm") {
  auto m = build_interval(0.0, 1.0, 129);
  auto theta = wt_profile("1 + x", m);
  Rng rng(11);
  for (double pv : {1.5, 2.0, 3.0}) {
    auto p = ExponentProfile(FieldExpr::constant(pv), m);
    for (int rep = 0; rep < 5; ++rep) {
      GridFunction f = realize(draw_sample(rng, 1), m);
      double s = 0.0;
      for (int i = 0; i < m->node_count(); ++i)
        s += m->quad_w[i] * theta[i] * std::pow(std::abs(f.values[i]), pv);
      const double classical = std::pow(s, 1.0 / pv);
      const double lux = luxemburg_norm(f, p, theta).value;
      REQUIRE(lux == Catch::Approx(classical).margin(1e-10).epsilon(1e-10));
    }
  }
}

TEST_CASE("Luxemburg norm is absolutely homogeneous and vanishes only at zero") {
  auto m = build_interval(0.0, 1.0, 65);
  auto p = exp_profile("2 + x", m);
  auto theta = wt_profile("1", m);

  GridFunction zero(m);
  const auto z = luxemburg_norm(zero, p, theta);
  REQUIRE(z.value == 0.0);
  REQUIRE(z.modular_at_value == 0.0);

  Rng rng(5);
  GridFunction f = realize(draw_sample(rng, 1), m);
  const double base = luxemburg_norm(f, p, theta).value;
  REQUIRE(base > 0.0);
  for (double c : {0.125, 3.0, -7.5}) {
    GridFunction g = f;
    for (double& v : g.values) v *= c;
    const double scaled = luxemburg_norm(g, p, theta).value;
    REQUIRE(scaled == Catch::Approx(std::abs(c) * base).epsilon(1e-9));
  }
}

TEST_CASE("the norm puts f/norm on the unit sphere of the modular") {
  auto m = build_interval(0.0, 1.0, 65);
  auto p = exp_profile("2 + sin(3*x)", m);
  auto theta = wt_profile("1 + 0.5*x", m);
  Rng rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    GridFunction f = realize(draw_sample(rng, 1), m);
    const auto nr = luxemburg_norm(f, p, theta);
    REQUIRE(std::abs(nr.modular_at_value - 1.0) <= 1e-8);

    GridFunction g = f;
    for (double& v : g.values) v /= nr.value;
    REQUIRE(std::abs(modular(g, p, theta) - 1.0) <= 1e-8);
  }
}

TEST_CASE("modular and norm sandwich each other through the exponent bounds") {
  auto m = build_interval(0.0, 1.0, 65);
  auto p = exp_profile("2 + x", m);
  auto theta = wt_profile("1", m);
  Rng rng(33);
  for (int rep = 0; rep < 50; ++rep) {
    GridFunction f = realize(draw_sample(rng, 1), m);
    const double n = luxemburg_norm(f, p, theta).value;
    const double r = modular(f, p, theta);
    const double lo = std::min(std::pow(n, p.lower()), std::pow(n, p.upper()));
    const double hi = std::max(std::pow(n, p.lower()), std::pow(n, p.upper()));
    REQUIRE(r >= lo - 1e-8);
    REQUIRE(r <= hi + 1e-8);
  }
}

TEST_CASE("degenerate weights are refused rather than silently normed") {
  auto m = build_interval(0.0, 1.0, 33);
  auto p = exp_profile("2", m);
  auto zero_weight = wt_profile("0", m);
  Rng rng(2);
  GridFunction f = realize(draw_sample(rng, 1), m);
  REQUIRE_THROWS_WITH(luxemburg_norm(f, p, zero_weight),
                      Catch::Matchers::ContainsSubstring("degenerate"));
}

TEST_CASE("Sobolev norm splits into function and gradient parts") {
  auto m = build_interval(0.0, 1.0, 65);
  auto p = exp_profile("2.5", m);
  auto q = exp_profile("1.5", m);
  auto theta = wt_profile("1", m);
  auto theta0 = wt_profile("1", m);

  Rng rng(7);
  GridFunction f = realize(draw_sample(rng, 1), m);
  const double full = sobolev_norm(f, q, p, theta0, theta);
  const double grad_part = equivalent_norm(f, p, theta);
  const double fn_part = luxemburg_norm(f, q, theta0).value;
  REQUIRE(full == Catch::Approx(fn_part + grad_part).epsilon(1e-12));
  REQUIRE(grad_part <= full);

  GridFunction raw(m);
  for (int i = 0; i < m->node_count(); ++i) raw.values[i] = 1.0;
  raw.trace_zero = false;
  REQUIRE_THROWS_AS(sobolev_norm(raw, q, p, theta0, theta), std::invalid_argument);
  REQUIRE_THROWS_AS(equivalent_norm(raw, p, theta), std::invalid_argument);
}

TEST_CASE("Hoelder pairing bounds the integral of the product") {
  auto m = build_interval(0.0, 1.0, 65);
  auto p = exp_profile("2 + x", m);
  auto theta = wt_profile("1 + x", m);
  Rng rng(13);
  for (int rep = 0; rep < 30; ++rep) {
    GridFunction f = realize(draw_sample(rng, 1), m);
    GridFunction g = realize(draw_sample(rng, 1), m);
    const auto [lhs, rhs] = holder_pairing(f, g, p, theta);
    REQUIRE(lhs <= rhs);
  }

  // Constant functions, p = 2, theta = 1: lhs = 1 and each factor is 1.
  auto p2 = exp_profile("2", m);
  auto one = wt_profile("1", m);
  GridFunction c1(m), c2(m);
  for (int i = 0; i < m->node_count(); ++i) c1.values[i] = c2.values[i] = 1.0;
  c1.trace_zero = c2.trace_zero = false;
  const auto [lhs, rhs] = holder_pairing(c1, c2, p2, one);
  REQUIRE(lhs == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(rhs == Catch::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("zero extension preserves modulars and norms exactly") {
  auto inner = build_interval(0.25, 0.75, 129);
  auto big = build_interval(0.0, 1.0, 257);

  auto p_in = exp_profile("2 + x", inner);
  auto p_big = exp_profile("2 + x", big);
  auto th_in = wt_profile("1 + x", inner);
  auto th_big = wt_profile("1 + x", big);

  Rng rng(77);
  for (int rep = 0; rep < 10; ++rep) {
    GridFunction f = realize(draw_sample(rng, 1), inner);
    apply_collar(f, 3);
    GridFunction ext = extend_by_zero(f, big->box);

    REQUIRE(modular(ext, p_big, th_big) == modular(f, p_in, th_in));

    const double nf = luxemburg_norm(f, p_in, th_in).value;
    const double ne = luxemburg_norm(ext, p_big, th_big).value;
    REQUIRE(ne == Catch::Approx(nf).margin(1e-12));

    // With a 3-layer collar the gradient stencils agree across the seam,
    // so the equivalent norm carries over too.
    const double gf = equivalent_norm(f, p_in, th_in);
    const double ge = equivalent_norm(ext, p_big, th_big);
    REQUIRE(ge == Catch::Approx(gf).margin(1e-12));
  }
}
