#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cohesive/catalog.hpp"
#include "cohesive/forward.hpp"
#include "cohesive/oracle.hpp"

using namespace cohesive;

namespace {
PhaseFieldModel linear_model() { return get("linear").analytic_models[0].model(); }
}  // namespace

TEST_CASE("oracle grid is symmetric about m and covers the interval") {
  for (double m : {0.1, 0.5, 0.93}) {
    for (int n : {10, 100, 2000}) {
      auto t = oracle_grid(m, n);
      CHECK(t.size() == static_cast<std::size_t>(n) + 1);
      CHECK(t.front() == doctest::Approx(2 * m - 1));
      CHECK(t.back() == doctest::Approx(1.0));
      CHECK(std::is_sorted(t.begin(), t.end()));
      CHECK(std::find(t.begin(), t.end(), m) != t.end());
      for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] - m == doctest::Approx(m - t[t.size() - 1 - i]));
    }
  }
}

TEST_CASE("configuration is validated") {
  OracleConfig c;
  CHECK_NOTHROW(c.validate());
  c.n_w = 1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = OracleConfig{};
  c.conv_tol = -1;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("Newton and coordinate descent agree at small size") {
  auto model = linear_model();
  OracleConfig nw;
  nw.n_w = 64;
  OracleConfig cd = nw;
  cd.method = OracleMethod::CoordinateDescent;
  cd.init = OracleInit::Affine;
  cd.max_iters = 200000;
  for (double s : {0.2, 0.7}) {
    auto a = discrete_profile(model, 0.5, s, nw);
    auto b = discrete_profile(model, 0.5, s, cd);
    CHECK(a.energy == doctest::Approx(b.energy).epsilon(1e-7));
    CHECK(a.energy >= a.lower_bound - 1e-14);
    // with a jump the discrete infimum is only approached as the jump cell's slope grows
    CHECK(a.energy - a.lower_bound <= (s < 0.5 ? 1e-9 : 1e-3) * a.energy);
    // descent never increases the energy
    for (std::size_t i = 1; i < b.energy_history.size(); ++i)
      CHECK(b.energy_history[i] <= b.energy_history[i - 1] + 1e-15);
    CHECK(b.w.front() == 0.0);
    CHECK(b.w.back() == doctest::Approx(s));
  }
}

TEST_CASE("affine start with Newton reaches the same energy") {
  auto model = get("hyperbolic").analytic_models[0].model();
  OracleConfig a;
  a.n_w = 200;
  OracleConfig b = a;
  b.init = OracleInit::Affine;
  auto p = discrete_profile(model, 0.4, 0.3, a);
  auto q = discrete_profile(model, 0.4, 0.3, b);
  CHECK(p.energy == doctest::Approx(q.energy).epsilon(1e-8));
}

TEST_CASE("discrete reduced energy converges to the continuous one") {
  auto model = linear_model();
  for (double s : {0.2, 0.45, 0.8}) {
    double e = energy_gs(model, 0.5, s);
    CHECK(discrete_Gm(model, 0.5, s, 2000) == doctest::Approx(e).epsilon(1e-5));
  }
}

TEST_CASE("the discrete profile reproduces the jump at m") {
  auto model = linear_model();
  const double m = 0.5, s = 0.8;
  auto p = discrete_profile(model, m, s);
  double near = 0;
  for (std::size_t i = 0; i + 1 < p.t.size(); ++i)
    if (std::abs(0.5 * (p.t[i] + p.t[i + 1]) - m) < 1e-4) near += p.w[i + 1] - p.w[i];
  CHECK(near == doctest::Approx(s - capital_phi(model, m)).epsilon(1e-2));
  auto below = discrete_profile(model, m, 0.3);
  double jump = 0;
  for (std::size_t i = 0; i + 1 < below.t.size(); ++i)
    if (std::abs(0.5 * (below.t[i] + below.t[i + 1]) - m) < 1e-4) jump += below.w[i + 1] - below.w[i];
  CHECK(jump < 1e-3);
}

TEST_CASE("discrete g matches the forward engine") {
  auto model = linear_model();
  OracleConfig cfg;
  cfg.n_w = 400;
  cfg.n_m = 40;
  cfg.threads = 2;
  auto r = discrete_g(model, 0.5, cfg);
  CHECK(r.g == doctest::Approx(0.375).epsilon(2e-3));
  CHECK(r.argmin_m == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(r.m_grid.size() == 40);
}

TEST_CASE("brute-force diffuse density") {
  auto d = default_degradation();
  CHECK(discrete_h_sigma(d, 0.0, 1.0) == 0.0);
  CHECK(discrete_h_sigma(d, 1.0, 0.0) == 0.0);
  CHECK(discrete_h_sigma(d, kInf, 3.0) == 9.0);
  CHECK(discrete_h_sigma(d, 10.0, 0.1) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(discrete_h_sigma(d, 1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-8));
  CHECK_THROWS_AS(discrete_h_sigma(d, 1.0, 1.0, 100), Error);
}
