#include <doctest.h>

#include <cmath>

#include "freebound/expr.hpp"
#include "freebound/types.hpp"

using namespace freebound;

TEST_CASE("height expression evaluates the standard cap profile") {
  auto f = HeightExpression::parse("0.2*(1-r^2)");
  CHECK(f(0.0, 0.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(f(1.0, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(f(0.6, 0.8) == doctest::Approx(0.0).epsilon(1e-15));  // r = 1
  CHECK(f(0.3, 0.4) == doctest::Approx(0.2 * (1 - 0.25)).epsilon(1e-15));
  CHECK(f.text() == "0.2*(1-r^2)");
}

TEST_CASE("operator precedence and associativity") {
  CHECK(HeightExpression::parse("2+3*2^3")(0, 0) == doctest::Approx(26.0));
  CHECK(HeightExpression::parse("2^3^2")(0, 0) == doctest::Approx(512.0));  // right assoc
  CHECK(HeightExpression::parse("-x^2")(3, 0) == doctest::Approx(-9.0));
  CHECK(HeightExpression::parse("2^-3")(0, 0) == doctest::Approx(0.125));
  CHECK(HeightExpression::parse("10-4-3")(0, 0) == doctest::Approx(3.0));  // left assoc
  CHECK(HeightExpression::parse("12/4/3")(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("variables and functions") {
  auto f = HeightExpression::parse("0.1*(1-r^2)*(2+cos(3*x)*sin(2*y))");
  const double x = 0.25, y = -0.4;
  const double r2 = x * x + y * y;
  const double expect = 0.1 * (1 - r2) * (2 + std::cos(3 * x) * std::sin(2 * y));
  CHECK(f(x, y) == doctest::Approx(expect).epsilon(1e-15));

  CHECK(HeightExpression::parse("exp(x)")(1.0, 0.0) == doctest::Approx(std::exp(1.0)));
  CHECK(HeightExpression::parse("r")(3.0, 4.0) == doctest::Approx(5.0));
}

TEST_CASE("whitespace is ignored") {
  auto f = HeightExpression::parse("  0.25 * ( 1 - r ^ 2 ) * ( 1 + 0.4 * x ) ");
  CHECK(f(0.5, 0.0) ==
        doctest::Approx(0.25 * (1 - 0.25) * (1 + 0.2)).epsilon(1e-15));
}

TEST_CASE("malformed expressions throw ParseError") {
  CHECK_THROWS_AS(HeightExpression::parse("1+"), ParseError);
  CHECK_THROWS_AS(HeightExpression::parse("foo(1)"), ParseError);
  CHECK_THROWS_AS(HeightExpression::parse("(1"), ParseError);
  CHECK_THROWS_AS(HeightExpression::parse("1 2"), ParseError);
  CHECK_THROWS_AS(HeightExpression::parse("z"), ParseError);
  CHECK_THROWS_AS(HeightExpression::parse(""), ParseError);
  CHECK_THROWS_AS(HeightExpression::parse("cos"), ParseError);
  CHECK_THROWS_AS(HeightExpression::parse("*2"), ParseError);
}
