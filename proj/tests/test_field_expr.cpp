#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "curvecert/field_expr.hpp"
#include "curvecert/rng.hpp"

using namespace curvecert;

namespace {

double eval1(const FieldExpr& e, double t, double x0) {
  const std::array<double, 1> x{x0};
  return e.eval(t, x);
}

double eval2(const FieldExpr& e, double t, double x0, double x1) {
  const std::array<double, 2> x{x0, x1};
  return e.eval(t, x);
}

}  // namespace

TEST_CASE("variables and simple expressions") {
  const FieldExpr id = parse_field_expr("x0", 1);
  CHECK(eval1(id, 0.0, 3.5) == 3.5);
  CHECK(eval1(id, 7.0, -1.25) == -1.25);

  const FieldExpr neg = parse_field_expr("-x1", 2);
  CHECK(eval2(neg, 0.0, 5.0, 2.5) == -2.5);

  const FieldExpr expr = parse_field_expr("exp(2*t) + x0*x0", 1);
  CHECK(eval1(expr, 0.0, 3.0) == doctest::Approx(10.0).epsilon(1e-15));
}

TEST_CASE("precedence and associativity") {
  CHECK(eval1(parse_field_expr("2-3*4", 1), 0, 0) == -10.0);
  CHECK(eval1(parse_field_expr("2*3-4", 1), 0, 0) == 2.0);
  CHECK(eval1(parse_field_expr("1-2-3", 1), 0, 0) == -4.0);
  CHECK(eval1(parse_field_expr("12/4/3", 1), 0, 0) == 1.0);
  CHECK(eval1(parse_field_expr("-x0-x0", 1), 0, 3.0) == -6.0);
  CHECK(eval1(parse_field_expr("2*-x0", 1), 0, 3.0) == -6.0);
  CHECK(eval1(parse_field_expr("(1+2)*3", 1), 0, 0) == 9.0);
  CHECK(eval1(parse_field_expr("pow(2, 1+1)", 1), 0, 0) == 4.0);
  CHECK(eval1(parse_field_expr("sin(0)", 1), 0, 0) == 0.0);
  CHECK(eval1(parse_field_expr("cos(0)", 1), 0, 0) == 1.0);
  CHECK(eval1(parse_field_expr("1.5e2 + .5", 1), 0, 0) == 150.5);
}

TEST_CASE("unknown names carry the offending identifier") {
  CHECK_THROWS_AS(parse_field_expr("x5", 2), UnknownVariable);
  CHECK_THROWS_AS(parse_field_expr("foo(3)", 1), UnknownVariable);
  try {
    parse_field_expr("x5", 2);
  } catch (const UnknownVariable& e) {
    CHECK(e.name == "x5");
  }
}

TEST_CASE("syntax errors carry a position") {
  CHECK_THROWS_AS(parse_field_expr("1 +", 1), ParseError);
  CHECK_THROWS_AS(parse_field_expr("(1+2", 1), ParseError);
  CHECK_THROWS_AS(parse_field_expr("pow(1)", 1), ParseError);
  CHECK_THROWS_AS(parse_field_expr("1 2", 1), ParseError);
  try {
    parse_field_expr("1 +", 1);
  } catch (const ParseError& e) {
    CHECK(e.position == 3);
  }
}

TEST_CASE("numeric domain violations raise EvalError") {
  const FieldExpr div = parse_field_expr("1/x0", 1);
  CHECK(eval1(div, 0.0, 2.0) == 0.5);
  CHECK_THROWS_AS(eval1(div, 0.0, 0.0), EvalError);

  const FieldExpr root = parse_field_expr("pow(x0, 0.5)", 1);
  CHECK(eval1(root, 0.0, 4.0) == 2.0);
  CHECK_THROWS_AS(eval1(root, 0.0, -1.0), EvalError);

  const FieldExpr overflow = parse_field_expr("exp(x0)", 1);
  CHECK_THROWS_AS(eval1(overflow, 0.0, 1e6), EvalError);
}

TEST_CASE("pretty-printed expressions evaluate identically when re-parsed") {
  const char* sources[] = {
      "x0",
      "-x1 + 2*t",
      "exp(2*t) + x0*x0",
      "pow(x0, 2) - sin(t)*cos(x1)",
      "1 - 2*t/(3 + x0*x0)",
      "-(x0 - x1)*(x0 + x1)",
      "0.1*x0 - 1.5e-3*t",
  };
  std::mt19937_64 rng(42);
  for (const char* src : sources) {
    const FieldExpr original = parse_field_expr(src, 2);
    const FieldExpr reparsed = parse_field_expr(original.to_string(), 2);
    for (int trial = 0; trial < 100; ++trial) {
      const double t = uniform_in(rng, -2.0, 2.0);
      const double a = uniform_in(rng, -2.0, 2.0);
      const double b = uniform_in(rng, -2.0, 2.0);
      CHECK(eval2(original, t, a, b) == eval2(reparsed, t, a, b));
    }
  }
}
