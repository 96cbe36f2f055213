#include <doctest.h>

#include <cmath>

#include "cohesive/catalog.hpp"
#include "cohesive/forward.hpp"
#include "cohesive/reconstruct.hpp"

using namespace cohesive;

namespace {
ScalarFn t2() {
  return [](double t) { return t * t; };
}
}  // namespace

TEST_CASE("R built from the target matches the closed forms") {
  for (const auto& n : names()) {
    auto e = get(n);
    if (!e.analytic_R || e.dugdale) continue;
    RFunction R = build_R(e.target);
    const double end = std::isfinite(R.sigma2) ? R.sigma2 : 20.0;
    for (double f : {0.0, 0.1, 0.3, 0.6, 0.9, 0.999}) {
      double t = f * end;
      INFO(n << " t=" << t);
      CHECK(R.R(t) == doctest::Approx((*e.analytic_R)(t)).epsilon(1e-9));
    }
  }
}

TEST_CASE("Abel inversion of a linear R") {
  RFunction R = build_R(get("linear").target);
  for (double tau : {0.01, 0.25, 0.5, 0.99}) {
    CHECK(abel_invert_linear(R, tau) == doctest::Approx(std::sqrt(tau) / M_PI).epsilon(1e-10));
  }
}

TEST_CASE("tabulated phi matches closed forms") {
  for (const char* n : {"linear", "hyperbolic", "exponential", "logarithmic"}) {
    auto e = get(n);
    RFunction R = build_R(e.target);
    SmallPhi phi = tabulate_phi(R, 512, 2);
    const double end = phi.regime == Regime::Linear ? phi.T_max : 30.0;
    for (double f : {0.0, 0.05, 0.3, 0.7, 0.95}) {
      double tau = f * end;
      INFO(n << " tau=" << tau);
      CHECK(phi(tau) == doctest::Approx((*e.analytic_phi)(tau)).epsilon(1e-6));
    }
  }
}

TEST_CASE("forward Abel transform of the tabulated phi returns R") {
  for (const char* n : {"linear", "bilinear", "hyperbolic", "exponential"}) {
    RFunction R = build_R(get(n).target);
    SmallPhi phi = tabulate_phi(R, 512, 2);
    ScalarFn f = [&](double t) { return phi(t); };
    for (double frac : {0.1, 0.5, 0.9, 0.999}) {
      double t = frac * R.sigma2;
      INFO(n << " t=" << t);
      CHECK(std::abs(abel_forward_linear(f, t, R.breakpoints) - R.R(t)) < 1e-6);
    }
  }
}

TEST_CASE("linear softening with khat fixed reproduces the closed-form omega") {
  auto e = get("linear");
  auto r = omega_from_khat(e.target, t2());
  CHECK(r.produced_name == "omega0(1-t)");
  CHECK(r.regime == Regime::Linear);
  for (double t : {0.0, 0.2, 0.5, 0.8, 0.99}) {
    CHECK(r.produced(t) == doctest::Approx((1 - t * t) / (M_PI * M_PI)).epsilon(1e-8));
  }
  // ω0 is positive away from 0 and vanishes at 0
  for (double x : {1e-6, 0.01, 0.5, 1.0}) CHECK(r.model.omega(x) > 0);
  CHECK(r.model.omega(0.0) == doctest::Approx(0.0));
  CHECK(r.diagnostics.abel_roundtrip_err < 1e-8);
}

TEST_CASE("linear softening with omega fixed produces an increasing fhat") {
  auto e = get("linear");
  auto r = khat_from_omega(e.target, [](double x) { return x * x / 4; });
  CHECK(r.produced_name == "fhat0_inverse");
  const auto& ref = e.analytic_models[1].produced;
  for (double y : {0.001, 0.1, 0.5, 0.9, 0.999}) CHECK(r.produced(y) == doctest::Approx(ref(y)).epsilon(1e-7));
  double prev = -1;
  for (double t = 0; t <= 1.0; t += 0.01) {
    double f = r.model.fhat(t);
    CHECK(f > prev);
    prev = f;
  }
  CHECK(r.model.fhat(0.0) == doctest::Approx(0.0));
  CHECK(r.model.fhat(1.0) == doctest::Approx(1.0));
}

TEST_CASE("reconstructed models have strictly decreasing Phi and round trip") {
  for (const char* n : {"linear", "hyperbolic"}) {
    auto e = get(n);
    auto r = omega_from_khat(e.target, t2());
    ForwardSolver fs(r.model, 256, 2);
    CHECK(fs.phi().classification == PhiClass::StrictlyDecreasing);
    std::vector<double> s;
    for (int i = 1; i <= 9; ++i) s.push_back(0.1 * i * e.target.s_frac0);
    auto rt = round_trip(e.target, r, s, 2);
    CHECK(rt.sup_rel_err < 5e-4);
  }
}

TEST_CASE("superlinear reconstruction with omega fixed") {
  auto e = get("logarithmic");
  auto r = khat_from_omega(e.target, [](double x) { return 9 * x / 16; });
  CHECK(r.produced_name == "khat0_inverse");
  CHECK(r.diagnostics.phi0_times_pi == doctest::Approx(1.0).epsilon(1e-6));
  const auto& ref = e.analytic_models[0].produced;
  for (double y : {0.1, 0.5, 2.0, 10.0}) CHECK(r.produced(y) == doctest::Approx(ref(y)).epsilon(1e-6));
}

TEST_CASE("Dugdale targets are rejected by the reconstruction") {
  try {
    omega_from_khat(get("dugdale").target, t2());
    FAIL("expected HypothesisViolation");
  } catch (const HypothesisViolation& e) {
    CHECK(std::string(e.what()).find("dugdale") != std::string::npos);
  }
}

TEST_CASE("sigma rescaling") {
  auto e = get("linear");
  auto unit = omega_from_khat(e.target, t2());
  auto r = rescale_sigma(unit, 2.0);
  CHECK(r.model.sigma == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(r.sigma_scaling == 2.0);
}

TEST_CASE("regularized exponential law") {
  auto t = regularize_exponential(1.0, 1e-2);
  const double sd = -std::log(0.1);
  CHECK(t.g0_prime(sd) == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(t.g0_prime(sd * 0.5) == doctest::Approx(std::exp(-sd * 0.5)));
  CHECK(t.g0_prime(t.s_frac0 * 1.0001) == 0.0);
  CHECK(std::isfinite(t.s_frac0));
  auto raw = regularize_exponential(1.0, 0.0);
  CHECK(raw.g0(2.0) == doctest::Approx(1 - std::exp(-2.0)));
}

TEST_CASE("quadratic hyperbolic: truncated phi still round trips") {
  auto e = get("quad_hyperbolic");
  auto r = omega_from_khat(e.target, t2());
  CHECK(r.diagnostics.phi_truncated);
  CHECK(r.diagnostics.blowup_exponent == doctest::Approx(0.75).epsilon(1e-2));
  std::vector<double> s{0.5, 1.0, 3.0, 8.0};
  CHECK(round_trip(e.target, r, s, 2).sup_rel_err < 5e-3);
}
