#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wvx/expr.hpp"
#include "wvx/fields.hpp"
#include "wvx/mesh.hpp"

using namespace wvx;

namespace {
ExponentProfile exp_profile(const char* src, MeshPtr m) {
  return ExponentProfile(FieldExpr::parse(src), std::move(m));
}
WeightProfile wt_profile(const char* src, MeshPtr m) {
  return WeightProfile(FieldExpr::parse(src), std::move(m));
}
}  // namespace

TEST_CASE("exponent bounds come from interior nodes") {
  auto m = build_interval(0.0, 1.0, 33);
  const double h = 1.0 / 32.0;

  // 1 + x touches 1 only at the left endpoint, which is excluded.
  auto p = exp_profile("1 + x", m);
  REQUIRE(p.lower() == Catch::Approx(1.0 + h).epsilon(1e-14));
  REQUIRE(p.upper() == Catch::Approx(2.0 - h).epsilon(1e-14));
  REQUIRE(p[0] == 1.0);

  auto c = exp_profile("2.5", m);
  REQUIRE(c.lower() == 2.5);
  REQUIRE(c.upper() == 2.5);
}

TEST_CASE("inadmissible exponents are rejected") {
  auto m = build_interval(0.0, 1.0, 17);
  REQUIRE_THROWS_AS(exp_profile("x", m), std::domain_error);           // inf <= 1
  REQUIRE_THROWS_AS(exp_profile("1", m), std::domain_error);           // inf == 1
  REQUIRE_THROWS_AS(exp_profile("exp(1000*x)", m), std::domain_error); // sup = inf

  std::vector<double> v(m->node_count(), 2.0);
  v[8] = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(ExponentProfile::from_values(FieldExpr::constant(2.0), m, v),
                    std::domain_error);
}

TEST_CASE("weights may vanish but not go negative") {
  auto m = build_interval(0.0, 1.0, 33);
  auto w = wt_profile("max(0, x - 0.5)", m);
  REQUIRE(w.floor() == 0.0);

  auto pos = wt_profile("1 + x", m);
  REQUIRE(pos.floor() == Catch::Approx(1.0 + 1.0 / 32.0).epsilon(1e-14));

  REQUIRE_THROWS_AS(wt_profile("x - 0.5", m), std::domain_error);
  REQUIRE_THROWS_AS(wt_profile("exp(1000*x)", m), std::domain_error);
}

TEST_CASE("precomputed weights tolerate infinite boundary values") {
  auto m = build_interval(0.0, 1.0, 9);
  std::vector<double> v(m->node_count(), 3.0);
  for (int i = 0; i < m->node_count(); ++i)
    if (m->boundary[i]) v[i] = std::numeric_limits<double>::infinity();
  auto w = WeightProfile::from_values(FieldExpr::constant(3.0), m, v);
  REQUIRE(w.floor() == 3.0);
}

TEST_CASE("conjugate exponent inverts itself") {
  auto m = build_interval(0.0, 1.0, 33);
  auto p = exp_profile("2 + x", m);
  auto pc = conjugate_exponent(p);
  for (int i = 0; i < m->node_count(); ++i) {
    REQUIRE(pc[i] == Catch::Approx(p[i] / (p[i] - 1.0)).epsilon(1e-14));
    REQUIRE(1.0 / p[i] + 1.0 / pc[i] == Catch::Approx(1.0).epsilon(1e-14));
  }
  auto back = conjugate_exponent(pc);
  for (int i = 0; i < m->node_count(); ++i)
    REQUIRE(back[i] == Catch::Approx(p[i]).epsilon(1e-12));
}

TEST_CASE("dual weight is the -1/(p-1) power") {
  auto m = build_interval(0.0, 1.0, 17);
  auto w = wt_profile("2", m);
  auto p = exp_profile("3", m);
  auto d = dual_weight(w, p);
  for (int i = 0; i < m->node_count(); ++i)
    REQUIRE(d[i] == Catch::Approx(std::pow(2.0, -0.5)).epsilon(1e-14));

  auto zero_floor = wt_profile("max(0, x - 0.5)", m);
  REQUIRE_THROWS_AS(dual_weight(zero_floor, p), std::domain_error);
}

TEST_CASE("Sobolev conjugate is dp/(d-p) below the dimension and infinite above") {
  REQUIRE(sobolev_conjugate_value(1.5, 2) == Catch::Approx(6.0));
  REQUIRE(std::isinf(sobolev_conjugate_value(2.0, 2)));
  REQUIRE(std::isinf(sobolev_conjugate_value(3.0, 2)));
  REQUIRE(std::isinf(sobolev_conjugate_value(2.0, 1)));

  auto m = build_rectangle(0.0, 1.0, 0.0, 1.0, 9, 9);
  auto p = exp_profile("1.5", m);
  auto s = sobolev_conjugate(p, 2);
  REQUIRE(s.lower == Catch::Approx(6.0));
  REQUIRE(s.upper == Catch::Approx(6.0));
}

TEST_CASE("standing assumption messages name the violated ordering") {
  auto m = build_interval(0.0, 1.0, 17);
  auto p2 = exp_profile("2", m);
  auto q15 = exp_profile("1.5", m);
  auto q25 = exp_profile("2.5", m);

  REQUIRE(standing_violation(q15, p2, 10.0).empty());

  const std::string gap = standing_violation(q25, p2, 10.0);
  REQUIRE(gap.find("1 < q- <= q+ < p- <= p+") != std::string::npos);
  REQUIRE(gap.find("q+ = 2.5") != std::string::npos);
  REQUIRE(gap.find("p- = 2") != std::string::npos);

  const std::string lam = standing_violation(q15, p2, 1.8);
  REQUIRE(lam.find("p+ < lambda") != std::string::npos);
  REQUIRE(lam.find("lambda = 1.8") != std::string::npos);
}

TEST_CASE("log-Hoelder check passes constants and flags steep profiles") {
  auto m = build_interval(0.0, 1.0, 65);

  auto flat = check_log_holder(exp_profile("2", m), 10.0, "p");
  REQUIRE(flat.pass);
  REQUIRE(flat.value == 0.0);
  REQUIRE(flat.witness.find("pair") != std::string::npos);

  // Gentle linear drift: |dp| * (-ln dist) is maximized near the smallest
  // separations and stays bounded by slope * h * ln(1/h), well under 10.
  auto mild = check_log_holder(exp_profile("2 + 0.5*x", m), 10.0, "p");
  REQUIRE(mild.pass);
  REQUIRE(mild.value > 0.0);

  // tanh ramp of width ~1e-3 jumps a full unit across one mesh cell.
  auto steep =
      check_log_holder(exp_profile("3 + 1/(1 + exp(-2000*(x - 0.5)))", m), 2.0, "p");
  REQUIRE_FALSE(steep.pass);
  REQUIRE(steep.value > 2.0);
}

TEST_CASE("jump condition holds in 1D and detects wide oscillation in 2D") {
  auto m1 = build_interval(0.0, 1.0, 33);
  auto ok1 = check_jump_condition(exp_profile("1.1 + x", m1), 0.25, "p");
  REQUIRE(ok1.pass);

  auto m2 = build_rectangle(0.0, 1.0, 0.0, 1.0, 17, 17);
  auto ok2 = check_jump_condition(exp_profile("3 + x", m2), 0.25, "p");
  REQUIRE(ok2.pass);

  // Near x=0 the local inf is 1.05, whose Sobolev conjugate 2*1.05/0.95
  // is about 2.21, while the ball already contains values beyond 2.3.
  auto bad = check_jump_condition(exp_profile("1.05 + 5*x", m2), 0.25, "p");
  REQUIRE_FALSE(bad.pass);
  REQUIRE(bad.witness.find("ball at") != std::string::npos);
}

TEST_CASE("weight class accepts integrable dual powers and rejects flat zeros") {
  auto m = build_interval(0.0, 1.0, 65);
  auto p = exp_profile("2", m);

  auto ok = check_weight_class(wt_profile("1", m), p, "theta");
  REQUIRE(ok.pass);
  REQUIRE(ok.witness.find("bounded on all cover levels") != std::string::npos);

  // theta = x^0.5 has dual power x^{-0.5}, integrable near zero.
  auto singular = check_weight_class(wt_profile("x^0.5", m), p, "theta");
  REQUIRE(singular.pass);

  // A weight identically zero on half the domain has dual power +inf there.
  auto flat = check_weight_class(wt_profile("max(0, x - 0.5)", m), p, "theta");
  REQUIRE_FALSE(flat.pass);
  REQUIRE(flat.witness.find("diverges") != std::string::npos);
}

TEST_CASE("embedding hypotheses report pass and failure modes") {
  auto m = build_interval(0.0, 1.0, 33);
  auto theta1 = wt_profile("1", m);
  auto theta0 = wt_profile("1", m);
  auto theta = wt_profile("1", m);
  auto alpha = exp_profile("2", m);
  auto t = exp_profile("1.5", m);
  auto q = exp_profile("2", m);
  auto p = exp_profile("3", m);

  EmbeddingHypotheses hyp;
  hyp.theta1 = &theta1;
  hyp.theta0 = &theta0;
  hyp.theta = &theta;
  hyp.alpha = &alpha;
  hyp.t = &t;
  hyp.q = &q;
  hyp.p = &p;
  hyp.floor_c = 0.5;

  auto reps = check_embedding_hypotheses(hyp, *m);
  REQUIRE(reps.size() == 3);
  for (const auto& r : reps) REQUIRE(r.pass);
  REQUIRE(reps[0].name == "theta1_alpha_integrable");
  REQUIRE(reps[1].name == "dual_power_integrable");
  REQUIRE(reps[2].name == "theta0_floor");

  // t >= q breaks the interior ordering and is reported, not thrown.
  auto t_big = exp_profile("2.5", m);
  hyp.t = &t_big;
  auto broken = check_embedding_hypotheses(hyp, *m);
  REQUIRE_FALSE(broken[1].pass);
  REQUIRE(broken[1].witness.find("1 < t < q < p fails") != std::string::npos);
  hyp.t = &t;

  // A floor requirement above the actual interior minimum fails.
  hyp.floor_c = 2.0;
  auto low = check_embedding_hypotheses(hyp, *m);
  REQUIRE_FALSE(low[2].pass);

  hyp.q = nullptr;
  REQUIRE_THROWS_AS(check_embedding_hypotheses(hyp, *m), std::invalid_argument);
}
