#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "wvx/expr.hpp"

using wvx::EvalError;
using wvx::FieldExpr;
using wvx::ParseError;

namespace {

double lib_eval(const std::string& src, double x, double y = 0.0) {
  const double pt[2] = {x, y};
  return FieldExpr::parse(src).eval(pt, 2);
}

}  // namespace

TEST_CASE("evaluation matches the independent reference evaluator") {
  const std::vector<std::string> exprs = {
      "2",
      "x",
      "y",
      "1+2*3",
      "(1+2)*3",
      "2-3-4",
      "24/4/2",
      "2^3^2",
      "-x^2",
      "2^-x",
      "1.5+0.25*x",
      "exp(x)+log(2+y)",
      "sqrt(abs(x-y))",
      "sin(3*x)*cos(2*y)",
      "min(x,y)+max(1,x*y)",
      "2+sin(x)*sin(x)",
      "1/(1+x^2)",
      "abs(-3.5)+x",
      "(x+y)^2-(x-y)^2",
      "exp(-(x-0.5)^2/0.01)",
      "max(0.1,min(x,1-x))",
      "-(-x)",
      "3*10^2",
  };
  const double coords[] = {-1.75, -0.5, 0.0, 0.3, 0.5, 1.0, 1.9};
  for (const auto& e : exprs) {
    for (double x : coords) {
      for (double y : coords) {
        INFO(e << " at (" << x << ", " << y << ")");
        REQUIRE(lib_eval(e, x, y) == oracle::eval(e, x, y));
      }
    }
  }
}

TEST_CASE("power is right-associative and binds above unary minus") {
  REQUIRE(lib_eval("2^3^2", 0) == 512.0);
  REQUIRE(lib_eval("-2^2", 0) == -4.0);
  REQUIRE(lib_eval("2^-1", 0) == 0.5);
  REQUIRE(lib_eval("(-2)^2", 0) == 4.0);
}

TEST_CASE("parse errors carry a byte offset") {
  for (const char* bad : {"", "1+", "(1+2", "1+*2", "foo(1)", "min(1)", "max(1,2,3)",
                          "sin()", "1..2", "x y", "@", "z", "+x"}) {
    INFO(bad);
    REQUIRE_THROWS_AS(FieldExpr::parse(bad), ParseError);
  }
  try {
    FieldExpr::parse("1+ (2*");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.offset == 6);  // the missing operand after '*'
  }
}

TEST_CASE("evaluation domain errors") {
  const double origin[2] = {0.0, 0.0};
  REQUIRE_THROWS_AS(FieldExpr::parse("1/x").eval(origin, 1), EvalError);
  REQUIRE_THROWS_AS(FieldExpr::parse("log(x)").eval(origin, 1), EvalError);
  REQUIRE_THROWS_AS(FieldExpr::parse("log(x-1)").eval(origin, 1), EvalError);
  REQUIRE_THROWS_AS(FieldExpr::parse("sqrt(x-1)").eval(origin, 1), EvalError);
  REQUIRE_THROWS_AS(FieldExpr::parse("x^-1").eval(origin, 1), EvalError);
  REQUIRE_THROWS_AS(FieldExpr::parse("(x-2)^0.5").eval(origin, 1), EvalError);
  // y is out of range on a one-dimensional domain
  REQUIRE_THROWS_AS(FieldExpr::parse("y").eval(origin, 1), EvalError);
  // negative base with an integer exponent is fine
  const double pt[1] = {-2.0};
  REQUIRE(FieldExpr::parse("x^3").eval(pt, 1) == -8.0);
}

TEST_CASE("composition API builds evaluable trees") {
  const FieldExpr p = FieldExpr::parse("2+x");
  const FieldExpr conj = p / (p - FieldExpr::constant(1.0));
  const double pt[1] = {0.5};
  REQUIRE(conj.eval(pt, 1) == Catch::Approx(2.5 / 1.5).epsilon(1e-15));

  const FieldExpr x = FieldExpr::coordinate(0);
  const FieldExpr e = FieldExpr::pow(x + FieldExpr::constant(1.0), FieldExpr::constant(2.0));
  REQUIRE(e.eval(pt, 1) == 2.25);
  REQUIRE((-x).eval(pt, 1) == -0.5);
  REQUIRE((x * x).eval(pt, 1) == 0.25);
}

TEST_CASE("str round-trips through the parser") {
  for (const char* src : {"1.5+0.25*x", "sin(3*x)*cos(2*y)", "2^-x", "min(x,max(y,0.5))",
                          "-x^2+1"}) {
    const FieldExpr e = FieldExpr::parse(src);
    const FieldExpr back = FieldExpr::parse(e.str());
    const double pt[2] = {0.37, -1.21};
    REQUIRE(e.eval(pt, 2) == back.eval(pt, 2));
  }
}

TEST_CASE("dimension reports the highest coordinate used") {
  REQUIRE(FieldExpr::parse("2").dimension() == 0);
  REQUIRE(FieldExpr::parse("x+1").dimension() == 1);
  REQUIRE(FieldExpr::parse("x*y").dimension() == 2);
}
