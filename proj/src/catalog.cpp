#include "cohesive/catalog.hpp"

#include <algorithm>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "cohesive/reconstruct.hpp"

namespace cohesive {

namespace {

constexpr double kPi = std::numbers::pi;

PhaseFieldModel unit_model(ScalarFn fhat, ScalarFn fhat_prime, ScalarFn omega, const std::string& name, bool check) {
  ModelOptions mo;
  mo.khat = fhat;
  mo.khat_prime = fhat_prime;
  mo.sigma = 1.0;
  mo.check_hypotheses = check;
  mo.name = name;
  return make_model(fhat, omega, omega, default_degradation(), mo);
}

// Model with f̂ = t², Q = ω and ω(1-t) = w1(t).
AnalyticModel khat_t2_pair(const std::string& label, ScalarFn w1) {
  AnalyticModel m;
  m.label = label;
  m.fixed_kind = "khat";
  m.produced_kind = "omega0(1-t)";
  m.fixed = [](double t) { return t * t; };
  m.produced = w1;
  m.build = [w1, label](bool check) {
    ScalarFn omega = [w1](double x) { return x <= 0 ? 0.0 : w1(1 - x); };
    return unit_model([](double t) { return t * t; }, [](double t) { return 2 * t; }, omega, label, check);
  };
  return m;
}

struct SinCos {
  double sin, cos;
};

/// sin θ and cos θ for arc_defect(θ) = c, given c and π/2 - c.
SinCos arc_angle(double c, double c_comp) {
  if (c <= kPi / 4) {
    double th = solve_arc_defect(c);
    return {std::sin(th), std::cos(th)};
  }
  // φ = π/2 - θ solves φ + sin φ cos φ = π/2 - c.
  if (c_comp <= 0) return {1.0, 0.0};
  double ph = brent_root([c_comp](double f) { return f + 0.5 * std::sin(2 * f) - c_comp; }, 0.0,
                         std::min(c_comp, kPi / 2), 1e-15 * c_comp);
  return {std::cos(ph), std::sin(ph)};
}

// f̂^{-1}(y) = 1 - (1 - (2/π)D(√y))^{1/q} (complement=false) or 1 - ((2/π)D(√(1-y)))^{1/q}.
AnalyticModel omega_pair(const std::string& label, ScalarFn omega, double q, bool complement) {
  AnalyticModel m;
  m.label = label;
  m.fixed_kind = "omega";
  m.produced_kind = "fhat0_inverse";
  m.fixed = omega;
  m.produced = [q, complement](double y) {
    y = std::clamp(y, 0.0, 1.0);
    if (!complement) {
      double eps = (2 / kPi) * asin_defect(std::sqrt(y));
      // 1 - (1-ε)^{1/q} without cancellation for small ε.
      return -std::expm1(std::log1p(-std::min(eps, 1.0)) / q);
    }
    double d = (2 / kPi) * asin_defect(std::sqrt(1 - y));
    return 1 - std::pow(d, 1 / q);
  };
  // c = arc_defect(θ) and its complement π/2 - c, both computed without cancellation.
  auto angle = [q, complement](double x) {
    double a = 0.5 * kPi * std::pow(1 - x, q);
    double b = -0.5 * kPi * std::expm1(q * std::log1p(-x));
    return complement ? arc_angle(a, b) : arc_angle(b, a);
  };
  auto fhat = [angle, complement](double x) {
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    SinCos sc = angle(x);
    return complement ? sc.cos * sc.cos : sc.sin * sc.sin;
  };
  auto fhat_prime = [q, angle](double x) {
    x = std::clamp(x, 1e-300, 1.0);
    SinCos sc = angle(x);
    return 0.5 * kPi * q * std::pow(1 - x, q - 1) * sc.cos / sc.sin;
  };
  m.build = [fhat, fhat_prime, omega, label](bool check) { return unit_model(fhat, fhat_prime, omega, label, check); };
  return m;
}

void need(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorKind::BadParameters, msg);
}

CatalogEntry dugdale(const CatalogParams& p) {
  const double k = p.k;
  CatalogEntry e;
  e.name = "dugdale";
  e.description = "g(s) = min(s, k)";
  e.dugdale = true;
  TargetCohesiveLaw& t = e.target;
  t.name = "dugdale";
  t.g0 = [k](double s) { return std::min(s, k); };
  t.g0_prime = [k](double s) { return s < k ? 1.0 : 0.0; };
  t.g0_second = [](double) { return 0.0; };
  t.sigma = 1.0;
  t.g_inf = k;
  t.s_frac0 = k;
  e.analytic_g = t.g0;
  e.analytic_g_prime = t.g0_prime;
  for (double q : {2.0, 1.5}) {
    std::string label = q == 2.0 ? "omega(x)=k^2 x^2" : "omega(x)=9k^2 x/16";
    ScalarFn omega = q == 2.0 ? ScalarFn([k](double x) { return k * k * x * x; })
                              : ScalarFn([k](double x) { return 9 * k * k * x / 16; });
    AnalyticModel m = omega_pair(label, omega, q, false);
    m.capital_phi = [k, q](double x) {
      x = std::clamp(x, 0.0, 1.0);
      SinCos sc = arc_angle(-0.5 * kPi * std::expm1(q * std::log1p(-x)), 0.5 * kPi * std::pow(1 - x, q));
      return 2 * k * sc.sin;
    };
    e.analytic_models.push_back(m);
  }
  return e;
}

CatalogEntry linear(const CatalogParams& p) {
  const double k = p.k;
  CatalogEntry e;
  e.name = "linear";
  e.description = "g'(s) = 1 - k s on [0, 1/k]";
  TargetCohesiveLaw& t = e.target;
  t.name = "linear";
  t.g0 = [k](double s) {
    s = std::min(s, 1 / k);
    return s - k * s * s / 2;
  };
  t.g0_prime = [k](double s) { return std::max(1 - k * s, 0.0); };
  t.g0_second = [k](double s) { return s <= 1 / k ? -k : 0.0; };
  t.g0_prime_inverse = [k](double y) { return std::clamp((1 - y) / k, 0.0, 1 / k); };
  t.sigma = 1.0;
  t.g_inf = 1 / (2 * k);
  t.s_frac0 = 1 / k;
  e.analytic_g = t.g0;
  e.analytic_g_prime = t.g0_prime;
  e.analytic_R = [k](double x) { return std::clamp(x, 0.0, 1.0) / (2 * k); };
  e.analytic_phi = [k](double tau) { return std::sqrt(std::max(tau, 0.0)) / (k * kPi); };
  e.analytic_models.push_back(
      khat_t2_pair("fhat(t)=t^2", [k](double t) { return (1 - t * t) / (k * k * kPi * kPi); }));
  e.analytic_models.push_back(
      omega_pair("omega(x)=x^2/(4k^2)", [k](double x) { return x * x / (4 * k * k); }, 2.0, true));
  e.analytic_models.push_back(
      omega_pair("omega(x)=9x/(64k^2)", [k](double x) { return 9 * x / (64 * k * k); }, 1.5, true));
  return e;
}

CatalogEntry bilinear(const CatalogParams& p) {
  const double k1 = p.k1, k2 = p.k2, a = p.a;
  need(k1 > 0 && k2 > 0 && a > 0, "bilinear: k1, k2 and a must be positive");
  need(k2 < k1, "bilinear: k2 < k1 is required");
  need(k1 * a < 1, "bilinear: 1 - k1 a must be positive");
  const double c = 1 - k1 * a + k2 * a;
  const double b = c / k2;
  if (p.b) {
    std::ostringstream os;
    os << "bilinear: g' is continuous only for b = (1 - k1 a + k2 a)/k2 = " << b;
    need(std::abs(*p.b - b) <= 1e-12 * b, os.str());
  }
  need(a < b, "bilinear: a < b is required");
  const double ga = a - k1 * a * a / 2;
  const double gb = ga + c * (b - a) - k2 * (b * b - a * a) / 2;
  CatalogEntry e;
  e.name = "bilinear";
  e.description = "g' piecewise linear with slopes -k1 on [0,a] and -k2 on (a,b]";
  e.params.b = b;
  TargetCohesiveLaw& t = e.target;
  t.name = "bilinear";
  t.g0 = [=](double s) {
    if (s <= a) return s - k1 * s * s / 2;
    s = std::min(s, b);
    return ga + c * (s - a) - k2 * (s * s - a * a) / 2;
  };
  t.g0_prime = [=](double s) {
    if (s <= a) return 1 - k1 * s;
    return std::max(c - k2 * s, 0.0);
  };
  t.g0_second = [=](double s) { return s <= a ? -k1 : (s <= b ? -k2 : 0.0); };
  t.g0_prime_inverse = [=](double y) {
    if (y >= 1) return 0.0;
    if (y >= 1 - k1 * a) return (1 - y) / k1;
    return std::min((c - std::max(y, 0.0)) / k2, b);
  };
  t.sigma = 1.0;
  t.g_inf = gb;
  t.s_frac0 = b;
  t.kinks = {a};
  e.analytic_g = t.g0;
  e.analytic_g_prime = t.g0_prime;
  const double tb = 1 - (1 - k1 * a) * (1 - k1 * a);
  e.analytic_R = [=](double x) {
    x = std::clamp(x, 0.0, 1.0);
    return x <= tb ? x / (2 * k1) : tb / (2 * k1) + (x - tb) / (2 * k2);
  };
  auto phi = [=](double tau) {
    tau = std::max(tau, 0.0);
    double v = std::sqrt(tau) / k1;
    if (tau > tb) v += (1 / k2 - 1 / k1) * std::sqrt(tau - tb);
    return v / kPi;
  };
  e.analytic_phi = phi;
  e.analytic_models.push_back(khat_t2_pair("fhat(t)=t^2", [=](double t) {
    double tc = 1 - k1 * a;
    double v = std::sqrt(std::max(1 - t * t, 0.0)) / (k1 * kPi);
    if (t <= tc) v += (1 / (k2 * kPi) - 1 / (k1 * kPi)) * std::sqrt(std::max(tc * tc - t * t, 0.0));
    return v * v;
  }));
  return e;
}

double hyperbolic_phi(double k, double tau) {
  tau = std::clamp(tau, 0.0, 1.0);
  if (tau >= 1) return 1 / (kPi * k);
  if (tau < 0.25) {
    // (1-τ)log(1-τ) + τ = Σ_{n≥2} τ^n/(n(n-1))
    double sum = 0, pw = 1;
    for (int n = 2; n < 60; ++n) {
      sum += pw / (n * (n - 1.0));
      pw *= tau;
    }
    return std::sqrt(tau) * sum / (kPi * k);
  }
  return ((1 - tau) * std::log1p(-tau) + tau) / (kPi * k * std::pow(tau, 1.5));
}

CatalogEntry hyperbolic(const CatalogParams& p) {
  const double k = p.k;
  CatalogEntry e;
  e.name = "hyperbolic";
  e.description = "g'(s) = 2/(1+ks) - 1 on [0, 1/k]";
  TargetCohesiveLaw& t = e.target;
  t.name = "hyperbolic";
  t.g0 = [k](double s) {
    s = std::min(s, 1 / k);
    return 2 / k * std::log1p(k * s) - s;
  };
  t.g0_prime = [k](double s) { return s <= 1 / k ? 2 / (1 + k * s) - 1 : 0.0; };
  t.g0_second = [k](double s) { return s <= 1 / k ? -2 * k / std::pow(1 + k * s, 2) : 0.0; };
  t.g0_prime_inverse = [k](double y) {
    y = std::clamp(y, 0.0, 1.0);
    return (1 - y) / (k * (1 + y));
  };
  t.sigma = 1.0;
  t.g_inf = (2 * std::log(2.0) - 1) / k;
  t.s_frac0 = 1 / k;
  e.analytic_g = t.g0;
  e.analytic_g_prime = t.g0_prime;
  e.analytic_R = [k](double x) {
    double y = std::sqrt(std::max(1 - x, 0.0));
    double s = (1 - y) / (k * (1 + y));
    return 2 / k * std::log(2 / (1 + y)) - s;
  };
  e.analytic_phi = [k](double tau) { return hyperbolic_phi(k, tau); };
  e.analytic_models.push_back(khat_t2_pair("fhat(t)=t^2", [k](double t) {
    double v = hyperbolic_phi(k, 1 - t * t);
    return v * v;
  }));
  return e;
}

CatalogEntry quad_hyperbolic(const CatalogParams& p) {
  const double k = p.k;
  CatalogEntry e;
  e.name = "quad_hyperbolic";
  e.description = "g'(s) = 1/(1+ks)^2";
  TargetCohesiveLaw& t = e.target;
  t.name = "quad_hyperbolic";
  t.g0 = [k](double s) { return s / (1 + k * s); };
  t.g0_prime = [k](double s) { return 1 / std::pow(1 + k * s, 2); };
  t.g0_second = [k](double s) { return -2 * k / std::pow(1 + k * s, 3); };
  t.g0_prime_inverse = [k](double y) {
    if (y <= 0) return kInf;
    return std::max(1 / std::sqrt(std::min(y, 1.0)) - 1, 0.0) / k;
  };
  t.sigma = 1.0;
  t.g_inf = 1 / k;
  t.s_frac0 = kInf;
  e.analytic_g = t.g0;
  e.analytic_g_prime = t.g0_prime;
  e.analytic_R = [k](double x) { return (1 - std::pow(std::max(1 - x, 0.0), 0.25)) / k; };
  return e;
}

CatalogEntry exponential(const CatalogParams& p) {
  const double k = p.k, d = p.delta;
  CatalogEntry e;
  e.name = "exponential";
  e.description = d > 0 ? "g'(s) = exp(-ks), linearized to zero where it reaches sqrt(delta)" : "g'(s) = exp(-ks)";
  e.target = regularize_exponential(k, d);
  e.target.name = "exponential";
  e.analytic_g = e.target.g0;
  e.analytic_g_prime = e.target.g0_prime;
  const double rd = std::sqrt(d);
  e.analytic_R = [k, d, rd](double x) {
    x = std::clamp(x, 0.0, 1.0);
    if (x <= 1 - d) return (1 - std::sqrt(1 - x)) / k;
    return (1 - rd) / k + (x - 1 + d) / (2 * k * rd);
  };
  e.analytic_phi = [k, d, rd](double tau) {
    tau = std::max(tau, 0.0);
    if (tau <= 1 - d) return std::atanh(std::sqrt(tau)) / (k * kPi);
    double r = std::sqrt(tau - 1 + d);
    return (std::log1p(std::sqrt(tau)) - std::log(rd + r) + r / rd) / (k * kPi);
  };
  if (d > 0) {
    e.analytic_models.push_back(khat_t2_pair("fhat(t)=t^2", [k, d, rd](double t) {
      t = std::clamp(t, 0.0, 1.0);
      double v;
      if (t <= rd) {
        double r = std::sqrt(std::max(d - t * t, 0.0));
        v = std::log((1 + std::sqrt(1 - t * t)) / (rd + r)) + r / rd;
      } else {
        v = std::log((1 + std::sqrt(1 - t * t)) / t);
      }
      v /= k * kPi;
      return v * v;
    }));
  }
  return e;
}

// P(z) = (2/π)∫_z^∞ x K1(x) dx, held as F = -log P on a grid in z.
struct BesselTail {
  SampledFunction F;
  double z_end = 0, F_end = 0, slope = 1;

  BesselTail() {
    const double Z = 60.0;
    const int n = 3001;
    std::vector<double> z = linspace(0.0, Z, n);
    auto f = [](double x) { return x <= 0 ? 1.0 : x * boost::math::cyl_bessel_k(1, x); };
    QuadratureSpec spec{1e-300, 1e-14, 1 << 12};
    std::vector<double> P(z.size());
    P.back() = (2 / kPi) * integrate_adaptive(f, Interval(Z, 2 * Z), spec);
    for (std::size_t i = z.size() - 1; i-- > 0;) {
      P[i] = P[i + 1] + (2 / kPi) * integrate_adaptive(f, Interval(z[i], z[i + 1]), spec);
    }
    double P0 = P.front();  // analytically 1
    std::vector<double> Fv(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) Fv[i] = -std::log(P[i] / P0);
    Fv.front() = 0.0;
    F = SampledFunction(z, Fv, Monotone::Increasing);
    z_end = Z;
    F_end = Fv.back();
    slope = (Fv.back() - Fv[n - 2]) / (z[n - 1] - z[n - 2]);
  }

  double P(double z) const {
    if (z >= z_end) return std::exp(-(F_end + slope * (z - z_end)));
    return std::exp(-F(z));
  }
  // z with -log P(z) = target.
  double z_of(double target) const {
    if (target <= 0) return 0.0;
    if (target >= F_end) return z_end + (target - F_end) / slope;
    return F.solve(target);
  }
};

const BesselTail& bessel_tail() {
  static const BesselTail tail;
  return tail;
}

CatalogEntry logarithmic(const CatalogParams& p) {
  const double k = p.k;
  CatalogEntry e;
  e.name = "logarithmic";
  e.description = "g'(s) = -log(ks) on (0, 1/k]";
  TargetCohesiveLaw& t = e.target;
  t.name = "logarithmic";
  t.regime = Regime::Superlinear;
  t.g0 = [k](double s) {
    if (s <= 0) return 0.0;
    s = std::min(s, 1 / k);
    return s * (1 - std::log(k * s));
  };
  t.g0_prime = [k](double s) {
    if (s <= 0) return kInf;
    return s < 1 / k ? -std::log(k * s) : 0.0;
  };
  t.g0_second = [k](double s) { return s <= 1 / k ? -1 / s : 0.0; };
  t.g0_prime_inverse = [k](double y) { return y <= 0 ? 1 / k : std::exp(-y) / k; };
  t.sigma = kInf;
  t.g_inf = 1 / k;
  t.s_frac0 = 1 / k;
  t.decay_envelope = DecayEnvelope::exp_sqrt(1 / (2 * k), 1.0);
  e.analytic_g = t.g0;
  e.analytic_g_prime = t.g0_prime;
  e.analytic_R = [k](double x) {
    double r = std::sqrt(std::max(x, 0.0));
    return (1 + r) * std::exp(-r) / k;
  };
  e.analytic_phi = [k](double tau) {
    double z = std::sqrt(std::max(tau, 0.0));
    double zk = z <= 0 ? 1.0 : z * boost::math::cyl_bessel_k(1, z);
    return zk / (k * kPi);
  };

  AnalyticModel m;
  m.label = "omega(x)=9x/(16k^2)";
  m.fixed_kind = "omega";
  m.produced_kind = "khat0_inverse";
  ScalarFn omega = [k](double x) { return 9 * x / (16 * k * k); };
  m.fixed = omega;
  m.produced = [](double t) { return 1 - std::pow(bessel_tail().P(std::sqrt(std::max(t, 0.0))), 2.0 / 3.0); };
  ScalarFn khat = [](double x) {
    if (x <= 0) return 0.0;
    if (x >= 1) return kInf;
    double z = bessel_tail().z_of(-1.5 * std::log1p(-x));
    return z * z;
  };
  ScalarFn khat_prime = [](double x) {
    if (x <= 0) return 0.0;
    if (x >= 1) return kInf;
    const BesselTail& bt = bessel_tail();
    double z = bt.z_of(-1.5 * std::log1p(-x));
    double Fp = z <= 0 ? 2 / kPi : (2 / kPi) * z * boost::math::cyl_bessel_k(1, z) / bt.P(z);
    return 2 * z * 1.5 / ((1 - x) * Fp);
  };
  std::string label = m.label;
  m.build = [omega, khat, khat_prime, label](bool check) {
    return assemble_superlinear_model(omega, khat, khat_prime, label, check);
  };
  e.analytic_models.push_back(m);
  return e;
}

}  // namespace

double arc_defect(double theta) {
  double x = 2 * theta;
  if (std::abs(x) < 0.1) {
    double x2 = x * x;
    double s = x * x2 / 6 * (1 - x2 / 20 * (1 - x2 / 42 * (1 - x2 / 72 * (1 - x2 / 110))));
    return s / 2;
  }
  return (x - std::sin(x)) / 2;
}

double asin_defect(double x) { return arc_defect(std::asin(std::clamp(x, 0.0, 1.0))); }

double solve_arc_defect(double c) {
  if (c <= 0) return 0.0;
  if (c >= kPi / 2) return kPi / 2;
  double w = std::cbrt(1.5 * c);
  double hi = std::min(kPi / 2, 2 * w);
  return brent_root([c](double th) { return arc_defect(th) - c; }, 0.0, hi, 4e-16 * w);
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> n{"dugdale",         "linear",      "bilinear",   "hyperbolic",
                                          "quad_hyperbolic", "exponential", "logarithmic"};
  return n;
}

CatalogEntry get(const std::string& name, const CatalogParams& params) {
  if (!(params.k > 0)) throw Error(ErrorKind::BadParameters, "k must be positive");
  CatalogEntry e;
  if (name == "dugdale") e = dugdale(params);
  else if (name == "linear") e = linear(params);
  else if (name == "bilinear") e = bilinear(params);
  else if (name == "hyperbolic") e = hyperbolic(params);
  else if (name == "quad_hyperbolic") e = quad_hyperbolic(params);
  else if (name == "exponential") e = exponential(params);
  else if (name == "logarithmic") e = logarithmic(params);
  else throw Error(ErrorKind::UnknownEntry, "unknown catalog entry '" + name + "'");
  CatalogParams p = params;
  if (e.params.b) p.b = e.params.b;
  e.params = p;
  e.has_closed_forms = !e.analytic_models.empty();
  return e;
}

}  // namespace cohesive
