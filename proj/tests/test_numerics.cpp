#include <doctest.h>

#include <cmath>
#include <random>

#include "cohesive/numerics.hpp"

using namespace cohesive;

TEST_CASE("adaptive quadrature on smooth integrands") {
  CHECK(integrate_adaptive([](double) { return 1.0; }, {0, 1}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate_adaptive([](double t) { return std::sqrt(1 - t * t); }, {0, 1}) ==
        doctest::Approx(M_PI / 4).epsilon(1e-9));
  CHECK(integrate_adaptive([](double t) { return t * t; }, {0, 2}) == doctest::Approx(8.0 / 3).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature errors") {
  CHECK_THROWS_AS(integrate_adaptive([](double t) { return t > 0.3 ? kNaN : 1.0; }, {0, 1}), Error);
  QuadratureSpec tight{1e-15, 1e-15, 4};
  try {
    integrate_adaptive([](double t) { return std::sin(200 * t); }, {0, 10}, tight);
    FAIL("expected NonConvergent");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonConvergent);
  }
  CHECK_THROWS_AS(Interval(1, 0), Error);
}

TEST_CASE("left square-root singular quadrature") {
  CHECK(integrate_left_sqrt_singular([](double) { return 1.0; }, {0, 1}) == doctest::Approx(2.0).epsilon(1e-13));
  for (double lam : {0.1, 1.0, 3.7}) {
    double expect = lam * std::beta(1.5, 0.5);
    CHECK(expect == doctest::Approx(lam * M_PI / 2).epsilon(1e-14));
    // ∫_0^λ √t (λ-t)^{-1/2} with the singular endpoint at λ, mirrored to the left form.
    double v = integrate_left_sqrt_singular([lam](double t) { return std::sqrt(lam - t); }, {0, lam});
    CHECK(v == doctest::Approx(expect).epsilon(1e-8));
  }
  for (double tau : {0.04, 0.5, 1.0}) {
    double v = integrate_left_sqrt_singular([](double) { return 0.5; }, {0, tau}) / M_PI;
    CHECK(v == doctest::Approx(std::sqrt(tau) / M_PI).epsilon(1e-13));
  }
  CHECK_THROWS_AS(integrate_left_sqrt_singular([](double t) { return 1 / t; }, {0, 1}), Error);
}

TEST_CASE("right square-root singular quadrature") {
  CHECK(integrate_right_sqrt_singular([](double) { return 1.0; }, {0, 1}) == doctest::Approx(2.0).epsilon(1e-13));
  for (double lam : {0.25, 1.0, 2.0}) {
    double v = integrate_right_sqrt_singular([](double t) { return std::sqrt(t) / M_PI; }, {0, lam});
    CHECK(v == doctest::Approx(lam / 2).epsilon(1e-8));
  }
  double v = integrate_right_sqrt_singular([](double t) { return t; }, {0, 1});
  CHECK(v == doctest::Approx(std::beta(2.0, 0.5)).epsilon(1e-13));
  CHECK(v == doctest::Approx(4.0 / 3).epsilon(1e-13));
}

TEST_CASE("singular quadrature agrees with truncated quadrature plus analytic correction") {
  auto h = [](double t) { return std::cos(t) + t * t; };
  double eps = 1e-6;
  double sing = integrate_left_sqrt_singular(h, {0, 1});
  // On [0, eps] h ≈ h(0) + h'(0) t, so ∫ h t^{-1/2} ≈ 2√eps h(0) + (2/3) eps^{3/2} h'(0).
  double corr = 2 * std::sqrt(eps) * h(0);
  double rest = integrate_adaptive([&](double t) { return h(t) / std::sqrt(t); }, {eps, 1}, {1e-12, 1e-12});
  CHECK(std::abs(sing - (rest + corr)) < 1e-6);
}

TEST_CASE("tail integrals") {
  auto env = DecayEnvelope::exp_sqrt(1.0, 0.9);
  double v = integrate_tail([](double t) { return std::exp(-std::sqrt(t)) / (2 * std::sqrt(t)); }, 0.0, env);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  double v2 = integrate_tail([](double t) { return std::exp(-t); }, 0.0, DecayEnvelope::exp_sqrt(1.0, 1.0));
  CHECK(v2 == doctest::Approx(1.0).epsilon(1e-9));
  double v3 = integrate_tail([](double t) { return 1 / (t * t); }, 1.0, DecayEnvelope::power(1.0, 2.0));
  CHECK(v3 == doctest::Approx(1.0).epsilon(1e-9));
  double v4 = integrate_tail([](double t) { return std::exp(-std::sqrt(t)); }, 0.0, DecayEnvelope::exp_sqrt(1, 1), {},
                             true);
  CHECK(v4 == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(integrate_tail([](double t) { return 1 / t; }, 1.0, DecayEnvelope::power(1.0, 2.0)), Error);
}

TEST_CASE("bracketed root finding") {
  CHECK(brent_root([](double x) { return x - 0.5; }, 0, 1, 1e-14) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(brent_root([](double x) { return x * x - 2; }, 1, 2, 1e-14) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(brent_root([](double x) { return std::cos(x); }, 1, 2, 1e-14) == doctest::Approx(M_PI / 2).epsilon(1e-14));
  try {
    brent_root([](double x) { return x * x + 1; }, -1, 1, 1e-12);
    FAIL("expected NoBracket");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoBracket);
  }
  double a = brent_root([](double x) { return std::exp(x) - 3; }, 0, 5, 1e-13);
  double b = brent_root([](double x) { return std::exp(x) - 3; }, 0, 5, 1e-13);
  CHECK(a == b);
}

TEST_CASE("sampled function interpolation and inversion") {
  auto g = linspace(0, 1, 11);
  auto id = tabulate([](double x) { return x; }, g, Monotone::Increasing);
  auto inv_id = invert_monotone(id);
  for (double x : {0.0, 0.13, 0.5, 0.97}) CHECK(inv_id(x) == doctest::Approx(x).epsilon(1e-14));

  auto sq = tabulate([](double x) { return x * x; }, cosine_grid(0, 1, 64), Monotone::Increasing);
  auto root = invert_monotone(sq);
  CHECK(root(0.25) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(sq.solve(0.25) == doctest::Approx(0.5).epsilon(1e-3));

  auto phi = tabulate([](double m) { return 1 - m; }, cosine_grid(0, 1, 32), Monotone::Decreasing);
  auto phi_inv = invert_monotone(phi);
  CHECK(phi_inv.monotone() == Monotone::Decreasing);
  CHECK(phi_inv(0.3) == doctest::Approx(0.7).epsilon(1e-12));

  CHECK_THROWS_AS(SampledFunction({0, 1, 2, 3}, {0, 2, 1, 3}, Monotone::Increasing), Error);
  CHECK_THROWS_AS(invert_monotone(SampledFunction({0, 1, 2, 3}, {0, 2, 1, 3})), Error);
  CHECK_THROWS_AS(SampledFunction({0, 1, 2}, {0, 1, 2}), Error);
}

TEST_CASE("inverse composed with original is the identity at nodes") {
  auto f = tabulate([](double x) { return std::exp(x) + x * x * x; }, cosine_grid(-1, 2, 40), Monotone::Increasing);
  auto fi = invert_monotone(f);
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    double x = f.grid()[i];
    CHECK(std::abs(fi(f(x)) - x) < 1e-8);
  }
}

TEST_CASE("interpolant never overshoots the node values") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> x(30), y(30);
  for (int i = 0; i < 30; ++i) {
    x[i] = i + 0.3 * u(rng);
    y[i] = u(rng);
  }
  SampledFunction f(x, y);
  for (int i = 0; i + 1 < 30; ++i) {
    double lo = std::min(y[i], y[i + 1]), hi = std::max(y[i], y[i + 1]);
    for (int j = 1; j < 20; ++j) {
      double v = f(x[i] + (x[i + 1] - x[i]) * j / 20.0);
      CHECK(v >= lo - 1e-14);
      CHECK(v <= hi + 1e-14);
    }
  }
}

TEST_CASE("lower convex envelope") {
  std::vector<double> g = linspace(0, 1, 21), v(21);
  for (int i = 0; i < 21; ++i) v[i] = (g[i] - 0.3) * (g[i] - 0.3);
  auto env = lower_convex_envelope(g, v);
  for (int i = 0; i < 21; ++i) CHECK(env.values()[i] == doctest::Approx(v[i]).epsilon(1e-14));

  for (int i = 0; i < 21; ++i) v[i] = -std::abs(g[i] - 0.5);
  env = lower_convex_envelope(g, v);
  for (int i = 0; i < 21; ++i) CHECK(env.values()[i] == doctest::Approx(-0.5).epsilon(1e-14));

  auto e4 = lower_convex_envelope({0, 1, 2, 3}, {0, 1, 0.1, 1.5});
  CHECK(e4(0) == doctest::Approx(0));
  CHECK(e4(1) == doctest::Approx(0.05));
  CHECK(e4(2) == doctest::Approx(0.1));
  CHECK(e4(3) == doctest::Approx(1.5));
}

TEST_CASE("convex envelope stays convex under refinement") {
  for (int n : {17, 65, 257}) {
    auto g = linspace(-2, 2, n);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::sin(3 * g[i]) + 0.2 * g[i] * g[i];
    auto env = lower_convex_envelope(g, v);
    const auto& e = env.values();
    for (std::size_t i = 1; i + 1 < e.size(); ++i) {
      CHECK(e[i + 1] - 2 * e[i] + e[i - 1] >= -1e-12);
      CHECK(e[i] <= v[i] + 1e-15);
    }
  }
}

TEST_CASE("Abel kernel round trip for a smooth density") {
  // forward: A(t) = ∫_0^t φ(τ)(t-τ)^{-1/2}; inverse: φ(τ) = (1/π) d/dτ ∫_0^τ A(t)(τ-t)^{-1/2}
  // With A(0)=0 the inverse is (1/π) ∫_0^τ A'(t)(τ-t)^{-1/2}.
  auto phi = [](double x) { return std::sqrt(x) * (1 + x * x); };
  auto forward = [&](double t) {
    if (t == 0) return 0.0;
    double half = t / 2;
    double left = integrate_adaptive(
        [&](double v) { return 2 * v * phi(v * v) / std::sqrt(t - v * v); }, {0, std::sqrt(half)}, {1e-13, 1e-12});
    double right = integrate_adaptive([&](double u) { return 2 * phi(t - u * u); }, {0, std::sqrt(t - half)},
                                      {1e-13, 1e-12});
    return left + right;
  };
  auto dforward = [&](double t) { return numeric_derivative(forward, t, 0, 1.2); };
  for (double tau : {0.01, 0.2, 0.5, 0.99}) {
    double back = integrate_right_sqrt_singular(dforward, {0, tau}, {1e-11, 1e-10}) / M_PI;
    CHECK(std::abs(back - phi(tau)) < 1e-6);
  }
}

TEST_CASE("numeric derivative and extrapolation helpers") {
  auto f = [](double x) { return std::sin(x); };
  CHECK(numeric_derivative(f, 0.5, 0, 1) == doctest::Approx(std::cos(0.5)).epsilon(1e-8));
  CHECK(numeric_derivative(f, 0.0, 0, 1) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(numeric_derivative(f, 1.0, 0, 1) == doctest::Approx(std::cos(1.0)).epsilon(1e-8));
  std::vector<double> seq;
  for (int j = 1; j < 10; ++j) seq.push_back(2 - std::pow(0.5, j));
  CHECK(aitken_limit(seq) == doctest::Approx(2.0).epsilon(1e-12));
  std::vector<double> div;
  for (int j = 1; j < 10; ++j) div.push_back(std::log(1 + j));
  CHECK_FALSE(looks_divergent(div));
  std::vector<double> lin;
  for (int j = 1; j < 10; ++j) lin.push_back(j * j);
  CHECK(looks_divergent(lin));
  auto [x, fx] = minimize_scalar([](double x) { return (x - 0.3) * (x - 0.3) + 1; }, 0, 1);
  CHECK(x == doctest::Approx(0.3).epsilon(1e-7));
  CHECK(fx == doctest::Approx(1.0));
}
