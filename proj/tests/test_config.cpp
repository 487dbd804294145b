#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "json.hpp"
#include "wvx/config.hpp"

using namespace wvx;

namespace {

const char* kMinimal = R"({
  "domain": {"dim": 1, "box": [[0, 1]], "n": [65]},
  "fields": {"p": "2", "q": "1.5", "theta": "1", "theta0": "1"}
})";

}  // namespace

TEST_CASE("a minimal config parses with defaults filled in") {
  const RunConfig c = parse_config_text(kMinimal);
  REQUIRE(c.domain.dim == 1);
  REQUIRE(c.domain.n[0] == 65);
  REQUIRE(c.p == "2");
  REQUIRE(c.lambda == 0.0);
  REQUIRE(c.solve.max_iterations == 200000);
  REQUIRE(c.solve.gradient_tolerance == 1e-6);
  REQUIRE(c.suite.samples == 100);
  REQUIRE(c.suites.empty());
  REQUIRE(c.output_dir == "out");
}

TEST_CASE("canonical serialization round-trips byte for byte") {
  RunConfig c = parse_config_text(kMinimal);
  c.theta1 = "1";
  c.r = "1.8";
  c.suites = {"sandwich", "lambda"};
  c.solve.seed = 42;

  const std::string first = canonical_config(c);
  const RunConfig back = parse_config_text(first);
  REQUIRE(canonical_config(back) == first);

  // Absent auxiliary fields stay absent.
  const RunConfig plain = parse_config_text(kMinimal);
  const std::string text = canonical_config(plain);
  REQUIRE(text.find("theta1") == std::string::npos);
  REQUIRE(text.find("\"beta\"") == std::string::npos);
}

TEST_CASE("unknown and missing keys are named in the error") {
  REQUIRE_THROWS_WITH(parse_config_text(R"({"domian": {}})"),
                      Catch::Matchers::ContainsSubstring("unknown key \"domian\""));
  REQUIRE_THROWS_WITH(
      parse_config_text(R"({
        "domain": {"dim": 1, "box": [[0, 1]], "n": [65]},
        "fields": {"p": "2", "q": "1.5", "theta": "1", "theta0": "1"},
        "solver": {"stepsize": 3}
      })"),
      Catch::Matchers::ContainsSubstring("unknown key \"stepsize\" in solver"));
  REQUIRE_THROWS_WITH(parse_config_text(R"({
        "domain": {"dim": 1, "box": [[0, 1]], "n": [65]},
        "fields": {"q": "1.5", "theta": "1", "theta0": "1"}
      })"),
                      Catch::Matchers::ContainsSubstring("missing required key \"p\""));
  REQUIRE_THROWS_AS(parse_config_text("{ not json"), ConfigError);
}

TEST_CASE("value constraints are enforced at parse time") {
  auto with = [](const std::string& extra) {
    return std::string(R"({
      "domain": {"dim": 1, "box": [[0, 1]], "n": [65]},
      "fields": {"p": "2", "q": "1.5", "theta": "1", "theta0": "1"})") +
           extra + "}";
  };
  REQUIRE_THROWS_AS(parse_config_text(with(R"(, "lambda": -1)")), ConfigError);
  REQUIRE_THROWS_AS(parse_config_text(with(R"(, "solver": {"max_iterations": 0})")),
                    ConfigError);
  REQUIRE_THROWS_AS(parse_config_text(with(R"(, "solver": {"backtrack_factor": 1.0})")),
                    ConfigError);
  REQUIRE_THROWS_AS(parse_config_text(with(R"(, "verify": {"samples": 0})")), ConfigError);
  REQUIRE_THROWS_WITH(parse_config_text(with(R"(, "verify": {"suites": ["sandwch"]})")),
                      Catch::Matchers::ContainsSubstring("unknown suite: sandwch"));

  REQUIRE_THROWS_AS(parse_config_text(R"({
    "domain": {"dim": 3, "box": [[0, 1]], "n": [65]},
    "fields": {"p": "2", "q": "1.5", "theta": "1", "theta0": "1"}
  })"),
                    ConfigError);
  REQUIRE_THROWS_AS(parse_config_text(R"({
    "domain": {"dim": 2, "box": [[0, 1]], "n": [9, 9]},
    "fields": {"p": "2", "q": "1.5", "theta": "1", "theta0": "1"}
  })"),
                    ConfigError);
}

TEST_CASE("make_problem realizes fields and names the offender on failure") {
  RunConfig c = parse_config_text(kMinimal);
  const Problem pr = make_problem(c);
  REQUIRE(pr.mesh->n[0] == 65);
  REQUIRE(pr.p.lower() == 2.0);
  REQUIRE_FALSE(pr.theta1.has_value());

  c.theta1 = "1";
  c.r = "1.8";
  c.t = "1.3";
  c.alpha = "2";
  const Problem aux = make_problem(c);
  REQUIRE(aux.theta1.has_value());
  REQUIRE(aux.r->lower() == 1.8);
  REQUIRE(aux.t->upper() == 1.3);

  RunConfig bad_syntax = parse_config_text(kMinimal);
  bad_syntax.p = "2 +";
  REQUIRE_THROWS_WITH(make_problem(bad_syntax),
                      Catch::Matchers::ContainsSubstring("field p"));

  RunConfig bad_class = parse_config_text(kMinimal);
  bad_class.q = "0.5";
  REQUIRE_THROWS_WITH(make_problem(bad_class),
                      Catch::Matchers::ContainsSubstring("field q"));

  RunConfig bad_weight = parse_config_text(kMinimal);
  bad_weight.theta = "x - 2";
  REQUIRE_THROWS_WITH(make_problem(bad_weight),
                      Catch::Matchers::ContainsSubstring("field theta"));
}

TEST_CASE("mesh construction honors the configured box") {
  const RunConfig c = parse_config_text(R"({
    "domain": {"dim": 2, "box": [[0, 2], [-1, 1]], "n": [17, 9]},
    "fields": {"p": "3", "q": "1.5", "theta": "1", "theta0": "1"}
  })");
  const Problem pr = make_problem(c);
  REQUIRE(pr.mesh->dim == 2);
  REQUIRE(pr.mesh->box[0][1] == 2.0);
  REQUIRE(pr.mesh->box[1][0] == -1.0);
  REQUIRE(pr.mesh->n[1] == 9);
}
