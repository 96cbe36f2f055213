#include <doctest.h>

#include <cmath>
#include <random>

#include "cohesive/catalog.hpp"
#include "cohesive/forward.hpp"

using namespace cohesive;

TEST_CASE("linear softening: Phi, g and g'") {
  auto model = get("linear").analytic_models[0].model();
  for (double m : {0.01, 0.2, 0.5, 0.8, 0.99}) CHECK(capital_phi(model, m) == doctest::Approx(1 - m).epsilon(1e-10));
  ForwardSolver fs(model);
  for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    CHECK(fs.g_value(s) == doctest::Approx(s - s * s / 2).epsilon(1e-10));
    CHECK(fs.g_derivative(s) == doctest::Approx(1 - s).epsilon(1e-8));
    // g'(s) = k̂^{1/2}(m_s)
    CHECK(std::sqrt(model.khat(fs.m_star(s))) == doctest::Approx(fs.g_derivative(s)).epsilon(1e-8));
  }
  for (double s : {1.0, 2.0, 10.0}) CHECK(fs.g_value(s) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fs.s_frac() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(fs.phi().classification == PhiClass::StrictlyDecreasing);
}

TEST_CASE("forward engine reproduces the closed-form laws") {
  for (const char* n : {"bilinear", "hyperbolic", "exponential", "logarithmic"}) {
    auto e = get(n);
    for (const auto& am : e.analytic_models) {
      ForwardSolver fs(am.model(), 512, 2);
      const double S = e.target.s_frac0;
      for (double f : {0.05, 0.25, 0.5, 0.75, 0.95, 1.5}) {
        double s = f * S;
        INFO(n << " " << am.label << " s=" << s);
        CHECK(fs.g_value(s) == doctest::Approx(e.analytic_g(s)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("g is concave, non-decreasing and bounded on random openings") {
  auto model = get("hyperbolic").analytic_models[0].model();
  ForwardSolver fs(model);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    double ga = fs.g_value(a), gb = fs.g_value(b), gm = fs.g_value(0.5 * (a + b));
    CHECK(gb >= ga - 1e-12);
    CHECK(gm >= 0.5 * (ga + gb) - 1e-10);
    CHECK(gb <= std::min(model.sigma * b, model.two_psi1()) + 1e-10);
  }
}

TEST_CASE("g' matches finite differences of g") {
  auto model = get("exponential").analytic_models[0].model();
  ForwardSolver fs(model);
  for (double s : {0.2, 1.0, 2.5}) {
    double h = 1e-5;
    double fd = (fs.g_value(s + h) - fs.g_value(s - h)) / (2 * h);
    CHECK(fs.g_derivative(s) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("Dugdale pairs") {
  for (const auto& am : get("dugdale").analytic_models) {
    auto model = am.model();
    ForwardSolver fs(model);
    for (double s : {0.1, 0.5, 0.99, 1.0, 1.7}) CHECK(fs.g_value(s) == doctest::Approx(std::min(s, 1.0)).epsilon(1e-9));
    double prev = 0;
    for (double m = 0.05; m < 1; m += 0.05) {
      double p = capital_phi(model, m);
      CHECK(p >= prev - 1e-12);
      CHECK(p == doctest::Approx(2 * std::sqrt(model.fhat(m))).epsilon(1e-9));
      prev = p;
    }
  }
}

TEST_CASE("cohesive curve is deterministic across thread counts") {
  auto model = get("bilinear").analytic_models[0].model();
  std::vector<double> s;
  for (int i = 0; i <= 40; ++i) s.push_back(0.05 * i);
  auto a = cohesive_curve(model, s, 1);
  auto b = cohesive_curve(model, s, 4);
  CHECK(a.g_values == b.g_values);
  CHECK(a.g_prime_values == b.g_prime_values);
}

TEST_CASE("optimal profiles: regular below the threshold, jump above") {
  auto model = get("linear").analytic_models[0].model();
  auto p = optimal_profile(model, 0.5, 0.3);
  CHECK(p.regularity == Regularity::W11);
  CHECK(p.jump == 0.0);
  auto q = optimal_profile(model, 0.5, 0.8);
  CHECK(q.regularity == Regularity::SBV_jump);
  CHECK(q.jump == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(q.t_samples.front() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(q.t_samples.back() == doctest::Approx(1.0));
  CHECK_THROWS_AS(optimal_profile(model, 0.5, 0.0), Error);
}

TEST_CASE("diffuse density for x/(1+x) in closed form") {
  auto d = default_degradation();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lv(-4, 4), lt(-6, 2);
  for (int i = 0; i < 200; ++i) {
    double vs = std::exp(lv(rng)), t = std::exp(lt(rng));
    double tau = std::max(2 * t / vs - 1, 0.0);
    double exact = t * t / (1 + tau) + vs * vs * tau / 4;
    CHECK(h_sigma(d, vs, t) == doctest::Approx(exact).epsilon(1e-10));
  }
  CHECK(h_sigma(d, 0.0, 1.0) == 0.0);
  CHECK(h_sigma(d, 1.0, 0.0) == 0.0);
  CHECK(h_sigma(d, kInf, 2.0) == 4.0);
}

TEST_CASE("diffuse density envelope is convex and below h") {
  auto d = default_degradation();
  std::vector<double> t;
  for (int i = 0; i <= 200; ++i) t.push_back(0.025 * i);
  auto env = h_sigma_envelope(d, 1.0, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(env.values()[i] <= h_sigma(d, 1.0, t[i]) + 1e-14);
    if (i > 0 && i + 1 < t.size())
      CHECK(env.values()[i + 1] - 2 * env.values()[i] + env.values()[i - 1] >= -1e-13);
  }
}
