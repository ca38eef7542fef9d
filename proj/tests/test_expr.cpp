#include <doctest.h>

#include <cmath>

#include "yamabe/expr.hpp"
#include "yamabe/metric.hpp"

using namespace yamabe;

TEST_CASE("parser handles the scenario grammar") {
  ScalarField f = parse_field("eps * sin(x1) * sin(x2) * sin(x3)", 3, {{"eps", 0.05}});
  std::vector<double> p{0.3, 0.7, 1.1};
  CHECK(f.eval(p) ==
        doctest::Approx(0.05 * std::sin(0.3) * std::sin(0.7) * std::sin(1.1)));
}

TEST_CASE("precedence and unary minus") {
  ScalarField f = parse_field("-x1 + 2*x2^2 - x1*x2/4", 2);
  std::vector<double> p{1.5, -2.0};
  CHECK(f.eval(p) == doctest::Approx(-1.5 + 2 * 4.0 - 1.5 * (-2.0) / 4.0));
}

TEST_CASE("powers bind tighter than products and allow negative exponents") {
  ScalarField f = parse_field("2*x1^3", 1);
  CHECK(f.eval(std::vector<double>{2.0}) == doctest::Approx(16.0));
  ScalarField g = parse_field("x1^-2", 1);
  CHECK(g.eval(std::vector<double>{2.0}) == doctest::Approx(0.25));
}

TEST_CASE("malformed expressions carry a position") {
  try {
    parse_field("sin(x1", 1);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position == 6);  // points at the end, where ')' was expected
  }
  CHECK_THROWS_AS(parse_field("x1 + ", 1), ParseError);
  CHECK_THROWS_AS(parse_field("foo(x1)", 1), ParseError);
  CHECK_THROWS_AS(parse_field("x9", 1), ParseError);
  CHECK_THROWS_AS(parse_field("x1 x2", 2), ParseError);
}

TEST_CASE("conformally rescaled metric components") {
  MetricField g = MetricField::flat(3);
  ScalarField phi = parse_field("x1/10", 3);
  MetricField gh = g.conformally_rescaled(phi);
  std::vector<double> p{0.5, 0.0, 0.0};
  DTensor v = gh.eval_at(p);
  double want = std::exp(2.0 * 0.05);
  CHECK(v.at(0, 0) == doctest::Approx(want));
  CHECK(v.at(1, 1) == doctest::Approx(want));
  CHECK(v.at(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("non positive definite metrics are rejected at lift") {
  MetricField g = MetricField::flat(2);
  g.comp[0] = parse_field("x1 - 2", 2);  // negative near the origin
  CHECK_THROWS_AS(g.lift_at(std::vector<double>{0.0, 0.0}, 2), GeometryError);
}
