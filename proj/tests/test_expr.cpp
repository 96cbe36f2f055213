#include <doctest.h>

#include <cmath>
#include <random>

#include "cohesive/expr.hpp"

using namespace cohesive;

namespace {
double eval(const std::string& s, double t = 0.0) { return Expression::parse(s)(t); }
}  // namespace

TEST_CASE("expression precedence and associativity") {
  CHECK(eval("1 + 2 * 3") == 7);
  CHECK(eval("(1 + 2) * 3") == 9);
  CHECK(eval("2^3^2") == 512);
  CHECK(eval("-2^2") == -4);
  CHECK(eval("8 / 4 / 2") == 1);
  CHECK(eval("1 - 2 - 3") == -4);
  CHECK(eval("t^2 - t/2", 3.0) == doctest::Approx(7.5));
  CHECK(eval("1e-3 * 2.5E2") == doctest::Approx(0.25));
}

TEST_CASE("expression functions and constants") {
  CHECK(eval("pi") == doctest::Approx(M_PI).epsilon(1e-16));
  CHECK(eval("exp(log(t))", 2.5) == doctest::Approx(2.5));
  CHECK(eval("sqrt(t)", 9.0) == 3);
  CHECK(eval("min(t, 1)", 3.0) == 1);
  CHECK(eval("max(t, 1)", 3.0) == 3);
  CHECK(eval("abs(-t)", 2.0) == 2);
  CHECK(eval("sin(pi/2) + cos(0)") == doctest::Approx(2.0));
  CHECK(eval("tanh(atanh(t))", 0.3) == doctest::Approx(0.3));
  CHECK(eval("asin(t) + acos(t)", 0.4) == doctest::Approx(M_PI / 2));
}

TEST_CASE("acosh(1/t) equals atanh(sqrt(1-t^2)) on (0,1)") {
  auto a = Expression::parse("acosh(1/t)");
  auto b = Expression::parse("atanh(sqrt(1 - t^2))");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1e-6, 1 - 1e-6);
  for (int i = 0; i < 200; ++i) {
    double t = u(rng);
    CHECK(a(t) == doctest::Approx(b(t)).epsilon(1e-9));
  }
}

TEST_CASE("canonical text re-parses to the same function") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (const char* src : {"t^2/4", "-(1 - t)^2 + exp(-3*t)", "min(t, 0.5) * max(1 - t, 0.2)", "2^-t^2",
                          "acosh(1/t)^2/(pi*pi)"}) {
    auto e = Expression::parse(src);
    auto again = Expression::parse(e.str());
    CHECK(again.str() == e.str());
    for (int i = 0; i < 50; ++i) {
      double t = u(rng);
      CHECK(again(t) == e(t));
    }
    CHECK(e.source() == src);
  }
}

TEST_CASE("malformed expressions are rejected") {
  for (const char* bad : {"", "t +", "(t", "t)", "foo(t)", "min(t)", "sqrt(t, 1)", "2 ** 3", "x", "1..2", "t t"}) {
    try {
      Expression::parse(bad);
      FAIL("accepted: " << bad);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ParseError);
    }
  }
}

TEST_CASE("expression as a scalar function") {
  ScalarFn f = Expression::parse("1 - t").fn();
  CHECK(f(0.25) == 0.75);
}
