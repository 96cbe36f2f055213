#include <doctest.h>

#include <cmath>

#include "cohesive/catalog.hpp"
#include "cohesive/numerics.hpp"

using namespace cohesive;

TEST_CASE("all entries exist and unknown names are rejected") {
  CHECK(names().size() == 7);
  for (const auto& n : names()) CHECK(get(n).name == n);
  try {
    get("no_such_law");
    FAIL("expected UnknownEntry");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownEntry);
  }
}

TEST_CASE("closed-form g' matches finite differences of g") {
  for (const auto& n : names()) {
    auto e = get(n);
    const double S = std::isfinite(e.target.s_frac0) ? e.target.s_frac0 : 10.0;
    for (double f : {0.07, 0.23, 0.41, 0.66, 0.93}) {
      double s = f * S;
      bool near_kink = false;
      for (double k : e.target.kinks) near_kink = near_kink || std::abs(s - k) < 1e-3;
      if (near_kink) continue;
      double h = 1e-6 * S;
      double fd = (e.analytic_g(s + h) - e.analytic_g(s - h)) / (2 * h);
      INFO(n << " s=" << s);
      CHECK(e.analytic_g_prime(s) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("target laws start at zero and saturate at g_inf") {
  for (const auto& n : names()) {
    auto e = get(n);
    INFO(n);
    CHECK(e.target.g0(0.0) == doctest::Approx(0.0));
    if (std::isfinite(e.target.s_frac0)) {
      CHECK(e.target.g0(e.target.s_frac0) == doctest::Approx(e.target.g_inf).epsilon(1e-12));
      CHECK(e.target.g0(3 * e.target.s_frac0) == doctest::Approx(e.target.g_inf).epsilon(1e-12));
    } else {
      CHECK(e.target.g0(1e8) == doctest::Approx(e.target.g_inf).epsilon(1e-7));
    }
  }
}

TEST_CASE("parameters rescale the laws") {
  CatalogParams p;
  p.k = 2.0;
  auto lin = get("linear", p);
  CHECK(lin.target.s_frac0 == doctest::Approx(0.5));
  CHECK(lin.target.g_inf == doctest::Approx(0.25));
  auto log2 = get("logarithmic", p);
  CHECK(log2.target.g0(0.25) == doctest::Approx(0.25 * (1 - std::log(0.5))));
}

TEST_CASE("bilinear end point is fixed by continuity") {
  auto e = get("bilinear");
  REQUIRE(e.params.b);
  CHECK(*e.params.b == doctest::Approx(1.25));
  const double a = e.params.a;
  CHECK(e.target.g0_prime(a - 1e-12) == doctest::Approx(e.target.g0_prime(a + 1e-12)).epsilon(1e-9));
  CatalogParams p;
  p.b = 1.3;
  CHECK_THROWS_AS(get("bilinear", p), Error);
  p.b = 1.25;
  CHECK_NOTHROW(get("bilinear", p));
  CatalogParams q;
  q.k2 = 3.0;
  CHECK_THROWS_AS(get("bilinear", q), Error);
}

TEST_CASE("arc defect helpers") {
  for (double th : {1e-6, 1e-3, 0.1, 0.7, 1.2, 1.5}) {
    CHECK(arc_defect(th) == doctest::Approx(th - std::sin(th) * std::cos(th)).epsilon(1e-9));
    CHECK(solve_arc_defect(arc_defect(th)) == doctest::Approx(th).epsilon(1e-10));
  }
  // small-argument series: asin x - x(1-x^2)^{1/2} = 2x^3/3 + x^5/5 + ...
  for (double x : {1e-5, 1e-3, 1e-2}) {
    double series = 2 * x * x * x / 3 + std::pow(x, 5) / 5 + 3 * std::pow(x, 7) / 28;
    CHECK(asin_defect(x) == doctest::Approx(series).epsilon(1e-12));
  }
  CHECK(asin_defect(1.0) == doctest::Approx(M_PI / 2));
}

TEST_CASE("exponential closed-form omega uses acosh on the outer branch") {
  const double k = 1.0, d = 1e-3;
  auto e = get("exponential");
  REQUIRE(!e.analytic_models.empty());
  const auto& w = e.analytic_models[0].produced;
  for (double t : {0.05, 0.2, 0.5, 0.9, 0.999}) {
    double a = std::acosh(1 / t) / (k * M_PI);
    CHECK(w(t) == doctest::Approx(a * a).epsilon(1e-12));
  }
  // both branches meet at t = sqrt(delta)
  const double rd = std::sqrt(d);
  CHECK(std::abs(w(rd * (1 - 1e-12)) - w(rd * (1 + 1e-12))) < 1e-10);
}

TEST_CASE("exponential regularization decreases with delta at fixed opening") {
  CatalogParams a, b;
  a.delta = 0.01;
  b.delta = 0.25;
  const double ga = get("exponential", a).analytic_g(1.5);
  const double gb = get("exponential", b).analytic_g(1.5);
  CHECK(ga == doctest::Approx(0.7769).epsilon(1e-3));
  CHECK(gb == doctest::Approx(0.7407).epsilon(1e-3));
  CHECK(ga > gb);
  // small delta approaches the unregularized law
  CatalogParams z;
  z.delta = 1e-8;
  CHECK(get("exponential", z).analytic_g(1.5) == doctest::Approx(1 - std::exp(-1.5)).epsilon(1e-6));
}

TEST_CASE("closed-form models satisfy the hypotheses") {
  for (const auto& n : names()) {
    for (const auto& am : get(n).analytic_models) {
      INFO(n << " " << am.label);
      CHECK_NOTHROW(am.model(true));
    }
  }
}

TEST_CASE("logarithmic closed forms") {
  auto e = get("logarithmic");
  REQUIRE(e.analytic_phi);
  CHECK((*e.analytic_phi)(0.0) * M_PI == doctest::Approx(1.0));
  CHECK((*e.analytic_R)(0.0) == doctest::Approx(1.0));
  CatalogParams p;
  p.k = 2.0;
  auto m = get("logarithmic", p).analytic_models[0].model();
  CHECK(m.two_psi1() == doctest::Approx(0.5).epsilon(1e-10));
}
