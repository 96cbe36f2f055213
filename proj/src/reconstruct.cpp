#include "cohesive/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cohesive/forward.hpp"
#include "cohesive/parallel.hpp"

namespace cohesive {

namespace {

constexpr double kPi = std::numbers::pi;
const QuadratureSpec kCumSpec{1e-15, 1e-12, 1 << 12};

// Nodes on [lo, hi] clustered quadratically harder than a cosine grid.
std::vector<double> clustered_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double c = 0.5 * (1 - std::cos(kPi * i / (n - 1.0)));
    double x = 0.5 * (1 - std::cos(kPi * c));
    g[i] = lo + (hi - lo) * x;
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

double second_derivative(const ScalarFn& g1, double s, double hi) {
  double h = 1e-6 * std::max(s, 1e-300);
  if (std::isfinite(hi) && s + h > hi) return (3 * g1(s) - 4 * g1(s - h) + g1(s - 2 * h)) / (2 * h);
  if (s - h <= 0) return (-3 * g1(s) + 4 * g1(s + h) - g1(s + 2 * h)) / (2 * h);
  return (g1(s + h) - g1(s - h)) / (2 * h);
}

// (g0')^{-1} by bracketed root finding on the decreasing g0'.
ScalarFn gp_inverse(const TargetCohesiveLaw& t) {
  if (t.g0_prime_inverse) return *t.g0_prime_inverse;
  const auto gp = t.g0_prime;
  const double S = t.s_frac0;
  const bool linear = t.regime == Regime::Linear;
  const double sig = t.sigma;
  return [gp, S, linear, sig](double y) {
    if (!(y > 0)) return S;
    if (linear && y >= sig) return 0.0;
    double lo = 0.0, hi;
    if (std::isfinite(S)) {
      hi = S;
    } else {
      hi = 1.0;
      int guard = 0;
      while (gp(hi) > y) {
        hi *= 2;
        if (++guard > 1100) return kInf;
      }
    }
    if (!linear) {
      lo = std::min(hi, 1.0) * 0.5;
      int guard = 0;
      while (gp(lo) < y) {
        lo *= 0.5;
        if (++guard > 1100) return 0.0;
      }
    }
    try {
      return brent_root([&](double s) { return gp(s) - y; }, lo, hi, 4e-16 * hi + 1e-300);
    } catch (const Error& e) {
      throw Error(ErrorKind::NotInvertible, std::string("g0' cannot be inverted: ") + e.what());
    }
  };
}

DecayEnvelope fit_envelope(const ScalarFn& Rp) {
  double a = std::abs(Rp(100.0)), b = std::abs(Rp(400.0)), c = std::abs(Rp(1600.0));
  if (!(a > 0) || !(b > 0) || !(a > b)) throw Error(ErrorKind::NonConvergent, "R' does not decay; declare an envelope");
  double p = std::log(a / b) / std::log(4.0);
  double pred_power = b * std::pow(4.0, -p);
  DecayEnvelope env;
  if (c >= 0.5 * pred_power && p > 0.5) {
    env = DecayEnvelope::power(1.0, p);
  } else {
    env = DecayEnvelope::exp_sqrt(1.0, std::log(a / b) / 10.0);
  }
  double C = 0;
  for (double x : {1.0, 25.0, 100.0, 400.0, 1600.0}) C = std::max(C, std::abs(Rp(x)) / env(x));
  env.C = 2 * C;
  return env;
}

// Integrates f over consecutive sub-intervals of [cuts.front(), cuts.back()].
double integrate_pieces(const ScalarFn& f, const std::vector<double>& cuts, const QuadratureSpec& spec) {
  double acc = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) acc += integrate_adaptive(f, Interval(cuts[i], cuts[i + 1]), spec);
  }
  return acc;
}

TargetCohesiveLaw normalized(const TargetCohesiveLaw& t) {
  if (t.regime != Regime::Linear || t.sigma == 1.0) return t;
  const double s = t.sigma;
  TargetCohesiveLaw n = t;
  auto g = t.g0, gp = t.g0_prime;
  n.g0 = [g, s](double x) { return g(x) / s; };
  n.g0_prime = [gp, s](double x) { return gp(x) / s; };
  if (t.g0_second) {
    auto g2 = *t.g0_second;
    n.g0_second = [g2, s](double x) { return g2(x) / s; };
  }
  if (t.g0_prime_inverse) {
    auto gi = *t.g0_prime_inverse;
    n.g0_prime_inverse = [gi, s](double y) { return gi(s * y); };
  }
  n.sigma = 1.0;
  n.g_inf = t.g_inf / s;
  return n;
}

void require_valid(const TargetCohesiveLaw& t, HypothesisReport& rep) {
  rep = validate_target(t, 2000);
  if (!rep.mandatory_pass()) {
    std::string msg = "target '" + t.name + "' violates the reconstruction hypotheses:\n" + rep.summary();
    const HypothesisCheck* c = rep.find("Hp7");
    if (c && !c->pass) msg += "Dugdale-type laws have no Abel reconstruction; use the catalog 'dugdale' models.\n";
    throw HypothesisViolation(msg, rep);
  }
}

// Light model carrying only ω for Ψ evaluations.
PhaseFieldModel omega_only(const ScalarFn& omega) {
  PhaseFieldModel m;
  m.omega = omega;
  m.psi1 = m.psi_bar(1.0);
  return m;
}

// Solves Ψ(x) = a, switching to the complement Ψ̄(1-x) = Ψ(1) - a = abar near x = 1.
double psi_inverse(const PhaseFieldModel& m, double a, double abar) {
  const double P = m.psi1;
  if (a <= 0) return 0.0;
  if (abar <= 0) return 1.0;
  if (abar < 0.5 * P) {
    double r = brent_root([&](double r) { return m.psi_bar(r) - abar; }, 0.0, 1.0, 1e-15);
    return 1.0 - r;
  }
  return brent_root([&](double x) { return m.psi(x) - a; }, 0.0, 1.0, 1e-15);
}

std::vector<std::size_t> increasing_subset(const std::vector<double>& v) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (keep.empty() || v[i] > v[keep.back()]) keep.push_back(i);
  }
  return keep;
}

SampledFunction strictly_increasing_table(const std::vector<double>& x, const std::vector<double>& y) {
  auto keep = increasing_subset(y);
  std::vector<double> gx, gy;
  for (auto i : keep) {
    gx.push_back(x[i]);
    gy.push_back(y[i]);
  }
  return SampledFunction(gx, gy, Monotone::Increasing);
}

double abel_check(const RFunction& R, const SmallPhi& phi, int n) {
  double worst = 0;
  ScalarFn f = [&phi](double tau) { return phi(tau); };
  if (R.regime == Regime::Linear) {
    double hi = R.sigma2 * (1 - 1e-3);
    for (int i = 1; i <= n; ++i) {
      double t = hi * i / n;
      worst = std::max(worst, std::abs(abel_forward_linear(f, t, R.breakpoints) - R.R(t)));
    }
  } else {
    double hi = phi.T_max / 2;
    for (int i = 0; i <= n; ++i) {
      double t = hi * std::pow(static_cast<double>(i) / n, 2.0);
      worst = std::max(worst, std::abs(abel_forward_super(f, t, phi.T_max, R.breakpoints) - R.R(t)));
    }
  }
  return worst;
}

// k̂0 held as √k̂0 against L = -log(1-x), extended linearly in L.
struct LogKhat {
  SampledFunction s_of_L;
  double L_end = 0, s_end = 0, slope = 0;

  double root(double x) const {
    if (x <= 0) return 0.0;
    if (x >= 1) return kInf;
    double L = -std::log1p(-x);
    if (L >= L_end) return s_end + slope * (L - L_end);
    return s_of_L(L);
  }
  double root_prime_L(double x) const {
    double L = -std::log1p(-x);
    return L >= L_end ? slope : s_of_L.derivative(L);
  }
};

LogKhat make_log_khat(const std::vector<double>& x, const std::vector<double>& t) {
  std::vector<double> L, s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= 1) break;
    L.push_back(-std::log1p(-x[i]));
    s.push_back(std::sqrt(t[i]));
  }
  LogKhat k;
  k.s_of_L = strictly_increasing_table(L, s);
  const auto& g = k.s_of_L.grid();
  k.L_end = g.back();
  k.s_end = k.s_of_L.values().back();
  std::size_t m = g.size();
  std::size_t j = m > 8 ? m - 8 : 0;
  k.slope = (k.s_end - k.s_of_L.values()[j]) / (k.L_end - g[j]);
  return k;
}

}  // namespace

PhaseFieldModel assemble_superlinear_model(const ScalarFn& omega, const ScalarFn& khat, const ScalarFn& khat_prime,
                                           const std::string& name, bool check) {
  ScalarFn fhat = [khat](double t) { return std::min(khat(t), 1.0); };
  ScalarFn Q = [omega, khat](double y) {
    if (y <= 0) return 0.0;
    double k = khat(1 - y);
    if (!(k > 0)) return omega(y);
    return omega(y) * std::min(k, 1.0) / k;
  };
  ModelOptions mo;
  mo.khat = khat;
  mo.khat_prime = khat_prime;
  mo.sigma = kInf;
  mo.check_hypotheses = check;
  mo.name = name;
  return make_model(fhat, Q, omega, default_degradation(), mo);
}

namespace {

PhaseFieldModel unit_linear_model(const ScalarFn& omega_tilde, const ScalarFn& fhat, const ScalarFn& fhat_prime,
                                  const std::string& name, bool check) {
  ModelOptions mo;
  mo.khat = fhat;
  mo.khat_prime = fhat_prime;
  mo.sigma = 1.0;
  mo.check_hypotheses = check;
  mo.name = name;
  return make_model(fhat, omega_tilde, omega_tilde, default_degradation(), mo);
}

void fill_forward_check(const TargetCohesiveLaw& target, ReconstructionResult& res, const ReconstructOptions& opt) {
  if (!opt.forward_check) return;
  double S = std::isfinite(target.s_frac0) ? target.s_frac0 : effective_s_frac(target, 1e-2);
  std::vector<double> s = linspace(0.02 * S, 0.98 * S, std::max(opt.forward_check_points, 2));
  RoundTrip rt = round_trip(target, res, s, opt.threads);
  res.diagnostics.forward_roundtrip_err = rt.sup_rel_err;
  res.diagnostics.forward_roundtrip_mean = rt.mean_rel_err;
}

void merge_report(HypothesisReport& into, const HypothesisReport& from) {
  for (const auto& c : from.checks) into.checks.push_back(c);
}

}  // namespace

// ---------------------------------------------------------------------------

RFunction build_R(const TargetCohesiveLaw& target) {
  RFunction R;
  R.regime = target.regime;
  ScalarFn inv = gp_inverse(target);
  const auto g0 = target.g0;
  const auto g1 = target.g0_prime;
  const double S = target.s_frac0;
  const double ginf = target.g_inf;
  ScalarFn g2;
  if (target.g0_second) {
    g2 = *target.g0_second;
  } else {
    g2 = [g1, S](double s) { return second_derivative(g1, s, S); };
  }
  auto value_at = [g0, ginf](double s) { return std::isfinite(s) ? g0(s) : ginf; };

  if (target.regime == Regime::Linear) {
    const double s2 = target.sigma * target.sigma;
    R.sigma2 = s2;
    R.s_of_t = [inv, s2](double t) { return inv(std::sqrt(std::max(s2 - t, 0.0))); };
    auto so = R.s_of_t;
    R.R = [so, value_at, s2](double t) {
      if (t <= 0) return 0.0;
      return value_at(so(std::min(t, s2)));
    };
    R.R_prime = [so, g2, s2](double t) {
      double s = so(std::clamp(t, 0.0, s2));
      if (!std::isfinite(s)) return kInf;
      return -1.0 / (2 * g2(s));
    };
    R.R_at_sigma2 = value_at(S);
    for (double sk : target.kinks) R.breakpoints.push_back(s2 - std::pow(g1(sk), 2));
  } else {
    R.sigma2 = kInf;
    R.s_of_t = [inv, S](double t) { return t <= 0 ? S : inv(std::sqrt(t)); };
    auto so = R.s_of_t;
    R.R = [so, value_at](double t) { return value_at(so(t)); };
    R.R_prime = [so, g2](double t) { return 1.0 / (2 * g2(so(t))); };
    R.R0 = value_at(S);
    for (double sk : target.kinks) R.breakpoints.push_back(std::pow(g1(sk), 2));
    R.envelope = target.decay_envelope ? *target.decay_envelope : fit_envelope(R.R_prime);
  }
  std::sort(R.breakpoints.begin(), R.breakpoints.end());
  return R;
}

double blowup_exponent(const RFunction& R) {
  if (R.regime != Regime::Linear) return kNaN;
  double a = std::abs(R.R_prime(R.sigma2 * (1 - 1e-8)));
  double b = std::abs(R.R_prime(R.sigma2 * (1 - 1e-6)));
  if (!std::isfinite(a)) return kInf;
  if (!(a > 0) || !(b > 0)) return 0.0;
  return std::log(a / b) / std::log(100.0);
}

double abel_invert_linear(const RFunction& R, double tau, const QuadratureSpec& spec) {
  if (tau <= 0) return 0.0;
  // t = τ - w²; kinks map to w = √(τ - t_k).
  const double W = std::sqrt(tau);
  std::vector<double> cuts{0.0};
  for (auto it = R.breakpoints.rbegin(); it != R.breakpoints.rend(); ++it) {
    if (*it > 0 && *it < tau) cuts.push_back(std::sqrt(tau - *it));
  }
  cuts.push_back(W);
  std::sort(cuts.begin(), cuts.end());
  const auto& Rp = R.R_prime;
  double v = integrate_pieces([&](double w) { return 2 * Rp(tau - w * w); }, cuts, spec);
  return v / kPi;
}

double abel_invert_super(const RFunction& R, double tau, const QuadratureSpec& spec) {
  tau = std::max(tau, 0.0);
  const double D = 1 + tau;
  const auto& Rp = R.R_prime;
  std::vector<double> cuts{0.0};
  for (double b : R.breakpoints) {
    if (b > tau && b < tau + D) cuts.push_back(std::sqrt(b - tau));
  }
  cuts.push_back(std::sqrt(D));
  double near = integrate_pieces([&](double w) { return 2 * Rp(tau + w * w); }, cuts, spec);
  if (!R.envelope) throw Error(ErrorKind::DomainError, "superlinear R needs a decay envelope");
  double far = integrate_tail([&](double t) { return Rp(t) / std::sqrt(t - tau); }, tau + D, *R.envelope, spec);
  return -(near + far) / kPi;
}

double abel_forward_linear(const ScalarFn& phi, double t, const std::vector<double>& breaks,
                           const QuadratureSpec& spec) {
  if (t <= 0) return 0.0;
  // τ = t - w²; the last piece carries the square-root behaviour of φ at τ = 0.
  std::vector<double> cuts{0.0};
  for (double b : breaks) {
    if (b > 0 && b < t) cuts.push_back(std::sqrt(t - b));
  }
  std::sort(cuts.begin(), cuts.end());
  const double W = std::sqrt(t);
  auto f = [&](double w) { return 2 * phi(t - w * w); };
  double acc = integrate_pieces(f, cuts, spec);
  return acc + integrate_sqrt_endpoints(f, Interval(cuts.back(), W), spec);
}

double abel_forward_super(const ScalarFn& phi, double t, double T, const std::vector<double>& breaks,
                          const QuadratureSpec& spec) {
  t = std::max(t, 0.0);
  if (T <= t) return 0.0;
  std::vector<double> cuts{0.0};
  for (double b : breaks) {
    if (b > t && b < T) cuts.push_back(std::sqrt(b - t));
  }
  cuts.push_back(std::sqrt(T - t));
  std::sort(cuts.begin(), cuts.end());
  return integrate_pieces([&](double w) { return 2 * phi(t + w * w); }, cuts, spec);
}

double SmallPhi::operator()(double tau) const {
  if (tau <= 0) return table(0.0);
  if (tau > T_max) {
    if (regime == Regime::Superlinear) return direct ? direct(tau) : 0.0;
    return table.values().back();
  }
  return table(std::sqrt(tau));
}

double super_truncation(const RFunction& R, double bound) {
  if (!R.envelope) throw Error(ErrorKind::DomainError, "superlinear R needs a decay envelope");
  return R.envelope->truncation_point(1.0, bound * std::max(1.0, std::abs(R.R0)), false);
}

SmallPhi tabulate_phi(const RFunction& R, int n, int threads) {
  SmallPhi out;
  out.regime = R.regime;
  n = std::max(n, 8);
  std::vector<double> u;
  if (R.regime == Regime::Linear) {
    double alpha = blowup_exponent(R);
    out.T_max = alpha < 0.01 ? R.sigma2 : R.sigma2 * (1 - 1e-6);
    out.truncated = alpha > 0.45;
  } else {
    out.T_max = super_truncation(R);
    out.tail = R.envelope;
    RFunction Rc = R;
    out.direct = [Rc](double tau) { return abel_invert_super(Rc, tau); };
  }
  const double U = std::sqrt(out.T_max);
  u = cosine_grid(0.0, U, n);
  // Geometric offsets resolve the (τ - t_b)^{1/2} onset past a kink and the
  // blow-up toward σ².
  std::vector<double> extra;
  std::vector<double> offsets;
  for (double d = 1e-12; d < 0.3; d *= 1.02) offsets.push_back(d * out.T_max);
  for (double b : R.breakpoints) {
    if (b <= 0 || b >= out.T_max) continue;
    extra.push_back(std::sqrt(b));
    for (double d : offsets) {
      if (b + d < out.T_max) extra.push_back(std::sqrt(b + d));
      if (b - d > 0) extra.push_back(std::sqrt(b - d));
    }
  }
  if (R.regime == Regime::Linear) {
    for (double d : offsets) {
      double tau = R.sigma2 - d;
      if (tau > 0 && tau < out.T_max) extra.push_back(std::sqrt(tau));
    }
  }
  u = merge_points(u, extra, 1e-14 * U);
  std::vector<double> v(u.size());
  parallel_for(u.size(), threads, [&](std::size_t i) {
    double tau = u[i] * u[i];
    v[i] = R.regime == Regime::Linear ? abel_invert_linear(R, tau) : abel_invert_super(R, tau);
  });
  out.table = SampledFunction(u, v);
  return out;
}

// ---------------------------------------------------------------------------

ReconstructionResult rescale_sigma(const ReconstructionResult& unit, double sigma) {
  if (unit.regime != Regime::Linear) throw Error(ErrorKind::WrongRegime, "sigma rescaling applies to the linear regime");
  ReconstructionResult r = unit;
  r.sigma_scaling = sigma;
  if (sigma == 1.0) return r;
  const double s2 = sigma * sigma;
  if (r.produced_name == "omega0(1-t)") {
    std::vector<double> vals = unit.produced.values();
    for (double& x : vals) x *= s2;
    r.produced = SampledFunction(unit.produced.grid(), vals, unit.produced.monotone());
  }
  const PhaseFieldModel& m = unit.model;
  PhaseFieldModel out = m;
  auto w = m.omega;
  auto kh = m.khat;
  auto kp = m.khat_prime;
  out.omega = [w, s2](double x) { return s2 * w(x); };
  out.Qfun = w;
  out.khat = [kh, s2](double t) { return s2 * kh(t); };
  out.khat_prime = [kp, s2](double t) { return s2 * kp(t); };
  out.sigma = sigma;
  out.psi1 = sigma * m.psi1;
  out.report = check_model(out, 2000);
  r.model = out;
  return r;
}

ReconstructionResult omega_from_khat(const TargetCohesiveLaw& target, const ScalarFn& khat0,
                                     std::optional<ScalarFn> sqrt_khat0_prime, const ReconstructOptions& opt) {
  ReconstructionResult res;
  res.fixed = {"khat", "khat0 fixed, omega0 produced"};
  res.regime = target.regime;
  res.produced_name = "omega0(1-t)";
  require_valid(target, res.diagnostics.hypothesis_report);
  const bool linear = target.regime == Regime::Linear;
  const TargetCohesiveLaw tt = normalized(target);
  RFunction R = build_R(tt);
  res.diagnostics.blowup_exponent = blowup_exponent(R);
  res.phi = tabulate_phi(R, 2 * opt.n_nodes, opt.threads);
  res.diagnostics.phi_truncated = res.phi.truncated;
  res.diagnostics.s_frac0 = target.s_frac0;
  if (opt.abel_check) res.diagnostics.abel_roundtrip_err = abel_check(R, res.phi, opt.abel_check_points);
  if (!linear) res.diagnostics.phi0_times_pi = res.phi(0.0) * kPi;

  // Shape with k̂(1) = 1 in the linear regime.
  const double scale = linear ? khat0(1.0) : 1.0;
  if (linear && !(scale > 0 && std::isfinite(scale))) {
    throw Error(ErrorKind::DomainError, "khat0(1) must be positive and finite in the linear regime");
  }
  ScalarFn kappa = [khat0, scale](double t) { return khat0(t) / scale; };
  ScalarFn root_prime;
  if (sqrt_khat0_prime) {
    auto sp = *sqrt_khat0_prime;
    double r = std::sqrt(scale);
    root_prime = [sp, r](double t) { return sp(t) / r; };
  } else {
    root_prime = [kappa](double t) {
      return numeric_derivative([&](double x) { return std::sqrt(std::max(kappa(x), 0.0)); }, t, 0.0, 1.0);
    };
  }

  std::vector<double> t = clustered_grid(0.0, 1.0, opt.n_nodes);
  std::vector<double> w(t.size());
  const SmallPhi& phi = res.phi;
  parallel_for(t.size(), opt.threads, [&](std::size_t i) {
    double ti = t[i];
    double k = kappa(ti);
    double tau = linear ? 1 - k : k;
    double p;
    if (!std::isfinite(tau) || (!linear && ti >= 1)) {
      p = 0;
    } else if (linear) {
      p = tau <= phi.T_max ? abel_invert_linear(R, tau) : phi(tau);
    } else {
      p = abel_invert_super(R, tau);
    }
    double d = root_prime(ti);
    double v = d * p;
    w[i] = std::isfinite(v) ? v * v : 0.0;
  });
  if (linear) w.front() = std::max(w.front(), 0.0);
  w.back() = 0.0;
  res.produced = SampledFunction(t, w);

  SampledFunction prod = res.produced;
  ScalarFn omega = [prod](double x) { return x <= 0 ? 0.0 : prod(1 - x); };
  if (linear) {
    ScalarFn kp = [kappa, root_prime](double x) { return 2 * std::sqrt(std::max(kappa(x), 0.0)) * root_prime(x); };
    res.model = unit_linear_model(omega, kappa, kp, target.name + " (reconstructed)", opt.check_model);
    merge_report(res.diagnostics.hypothesis_report, res.model.report);
    ReconstructionResult scaled = rescale_sigma(res, target.sigma);
    fill_forward_check(target, scaled, opt);
    return scaled;
  }
  ScalarFn kp = [kappa, root_prime](double x) { return 2 * std::sqrt(std::max(kappa(x), 0.0)) * root_prime(x); };
  res.model = assemble_superlinear_model(omega, kappa, kp, target.name + " (reconstructed)", opt.check_model);
  merge_report(res.diagnostics.hypothesis_report, res.model.report);
  fill_forward_check(target, res, opt);
  return res;
}

ReconstructionResult khat_from_omega(const TargetCohesiveLaw& target, const ScalarFn& omega0,
                                     const ReconstructOptions& opt) {
  ReconstructionResult res;
  res.fixed = {"omega", "omega0 fixed"};
  res.regime = target.regime;
  require_valid(target, res.diagnostics.hypothesis_report);
  const bool linear = target.regime == Regime::Linear;
  const PhaseFieldModel full = omega_only(omega0);
  res.diagnostics.compatibility_gap = std::abs(2 * full.psi1 - target.g_inf);
  if (!(res.diagnostics.compatibility_gap <= 1e-8)) {
    std::ostringstream os;
    os.precision(12);
    os << "2 Psi0(1) = " << 2 * full.psi1 << " differs from g0(inf) = " << target.g_inf;
    throw Error(ErrorKind::CompatibilityError, os.str());
  }
  const double sig = linear ? target.sigma : 1.0;
  const double s2 = sig * sig;
  ScalarFn omega_t = [omega0, s2](double x) { return omega0(x) / s2; };
  const PhaseFieldModel om = omega_only(omega_t);
  const double P = om.psi1;

  const TargetCohesiveLaw tt = normalized(target);
  const double ginf = tt.g_inf;
  RFunction R = build_R(tt);
  res.diagnostics.blowup_exponent = blowup_exponent(R);
  res.phi = tabulate_phi(R, 2 * opt.n_nodes, opt.threads);
  res.diagnostics.phi_truncated = res.phi.truncated;
  res.diagnostics.s_frac0 = target.s_frac0;
  if (opt.abel_check) res.diagnostics.abel_roundtrip_err = abel_check(R, res.phi, opt.abel_check_points);
  const SmallPhi& phi = res.phi;

  if (linear) {
    res.produced_name = "fhat0_inverse";
    // I(t) = ∫_0^t φ(τ)(1-τ)^{-1/2} dτ, split into a bottom and a top form.
    auto I_bottom = [&phi](double t) {
      if (t <= 0) return 0.0;
      return integrate_adaptive(
          [&phi](double u) { return 2 * u * phi(u * u) / std::sqrt((1 - u) * (1 + u)); },
          Interval(0.0, std::sqrt(t)), kCumSpec);
    };
    auto I_top = [&phi](double t) {
      if (t >= 1) return 0.0;
      return integrate_adaptive([&phi](double v) { return 2 * phi(1 - v * v); }, Interval(0.0, std::sqrt(1 - t)),
                                kCumSpec);
    };
    const double Itotal = I_bottom(0.5) + I_top(0.5);
    std::vector<double> y = clustered_grid(0.0, 1.0, opt.n_nodes);
    std::vector<double> x(y.size());
    parallel_for(y.size(), opt.threads, [&](std::size_t i) {
      double t = 1 - y[i];
      double a, abar;
      if (t <= 0.5) {
        double Ib = I_bottom(t);
        abar = (P - ginf / 2) + Ib / 2;
        a = P - abar;
      } else {
        double It = I_top(t);
        a = ginf / 2 - (Itotal - It) / 2;
        abar = P - a;
      }
      x[i] = psi_inverse(om, a, abar);
    });
    x.front() = 0.0;
    x.back() = 1.0;
    res.produced = strictly_increasing_table(y, x);
    res.produced_direct = invert_monotone(res.produced);
    SampledFunction fh = *res.produced_direct;
    ScalarFn fhat = [fh](double t) { return std::clamp(fh(t), 0.0, 1.0); };
    ScalarFn fhat_prime = [fh](double t) { return fh.derivative(t); };
    res.model = unit_linear_model(omega_t, fhat, fhat_prime, target.name + " (reconstructed)", opt.check_model);
    merge_report(res.diagnostics.hypothesis_report, res.model.report);
    ReconstructionResult scaled = rescale_sigma(res, target.sigma);
    fill_forward_check(target, scaled, opt);
    return scaled;
  }

  res.produced_name = "khat0_inverse";
  res.diagnostics.phi0_times_pi = phi(0.0) * kPi;
  // K(t) = ∫_0^t φ(τ)τ^{-1/2} dτ = 2∫_0^{√t} φ(v²) dv on the grid t = (ξ√T)².
  const double U = std::sqrt(phi.T_max);
  std::vector<double> xi = cosine_grid(0.0, 1.0, opt.n_nodes);
  std::vector<double> v(xi.size()), cell(xi.size(), 0.0);
  for (std::size_t i = 0; i < xi.size(); ++i) v[i] = xi[i] * U;
  parallel_for(xi.size() - 1, opt.threads, [&](std::size_t i) {
    cell[i + 1] = integrate_adaptive([&phi](double s) { return 2 * phi(s * s); }, Interval(v[i], v[i + 1]), kCumSpec);
  });
  std::vector<double> Kb(xi.size(), 0.0), Kt(xi.size(), 0.0);
  for (std::size_t i = 1; i < xi.size(); ++i) Kb[i] = Kb[i - 1] + cell[i];
  for (std::size_t i = xi.size() - 1; i-- > 0;) Kt[i] = Kt[i + 1] + cell[i + 1];
  const double Ktotal = Kb.back();
  std::vector<double> t(xi.size()), x(xi.size());
  parallel_for(xi.size(), opt.threads, [&](std::size_t i) {
    t[i] = v[i] * v[i];
    double a = Kb[i] / 2 - (Ktotal - ginf) / 2;
    double abar = (P - ginf / 2) + Kt[i] / 2;
    if (Kb[i] < Kt[i]) abar = P - a; else a = P - abar;
    x[i] = psi_inverse(om, a, abar);
  });
  x.front() = 0.0;
  res.produced = strictly_increasing_table(t, x);
  res.produced_direct = invert_monotone(res.produced);
  LogKhat lk = make_log_khat(res.produced.values(), res.produced.grid());
  ScalarFn khat = [lk](double x) {
    double s = lk.root(x);
    return s * s;
  };
  ScalarFn khat_prime = [lk](double x) {
    if (x <= 0 || x >= 1) return x >= 1 ? kInf : 2 * lk.root(x) * lk.root_prime_L(x);
    return 2 * lk.root(x) * lk.root_prime_L(x) / (1 - x);
  };
  res.model = assemble_superlinear_model(omega0, khat, khat_prime, target.name + " (reconstructed)", opt.check_model);
  merge_report(res.diagnostics.hypothesis_report, res.model.report);
  fill_forward_check(target, res, opt);
  return res;
}

// ---------------------------------------------------------------------------

TargetCohesiveLaw regularize_exponential(double k, double delta) {
  if (!(k > 0)) throw Error(ErrorKind::BadParameters, "k must be positive");
  if (!(delta >= 0 && delta < 1)) throw Error(ErrorKind::BadParameters, "delta must lie in [0, 1)");
  TargetCohesiveLaw t;
  t.regime = Regime::Linear;
  t.sigma = 1.0;
  if (delta == 0) {
    t.name = "exponential";
    t.g0 = [k](double s) { return -std::expm1(-k * s) / k; };
    t.g0_prime = [k](double s) { return std::exp(-k * s); };
    t.g0_second = [k](double s) { return -k * std::exp(-k * s); };
    t.g0_prime_inverse = [k](double y) { return y >= 1 ? 0.0 : (y <= 0 ? kInf : -std::log(y) / k); };
    t.g_inf = 1 / k;
    t.s_frac0 = kInf;
    return t;
  }
  const double rd = std::sqrt(delta);
  const double sd = -std::log(delta) / (2 * k);
  const double sf = sd + 1 / k;
  t.name = "exponential_delta";
  t.g0 = [k, rd, sd, sf](double s) {
    if (s <= sd) return -std::expm1(-k * s) / k;
    double d = std::min(s, sf) - sd;
    return (1 - rd) / k + rd * (d - k * d * d / 2);
  };
  t.g0_prime = [k, rd, sd, sf](double s) {
    if (s <= sd) return std::exp(-k * s);
    if (s >= sf) return 0.0;
    return rd * (1 - k * (s - sd));
  };
  t.g0_second = [k, rd, sd, sf](double s) {
    if (s <= sd) return -k * std::exp(-k * s);
    if (s > sf) return 0.0;
    return -k * rd;
  };
  t.g0_prime_inverse = [k, rd, sd, sf](double y) {
    if (y >= 1) return 0.0;
    if (y <= 0) return sf;
    if (y >= rd) return std::min(-std::log(y) / k, sd);
    return sd + (1 - y / rd) / k;
  };
  t.g_inf = (1 - rd / 2) / k;
  t.s_frac0 = sf;
  t.kinks = {sd};
  return t;
}

RoundTrip round_trip(const TargetCohesiveLaw& target, const ReconstructionResult& result,
                     const std::vector<double>& s_grid, int threads) {
  RoundTrip rt;
  for (double s : s_grid) {
    if (s > 0 && (!std::isfinite(target.s_frac0) || s <= target.s_frac0)) rt.s.push_back(s);
  }
  if (rt.s.empty()) return rt;
  CohesiveCurve c = cohesive_curve(result.model, rt.s, threads);
  rt.g_model = c.g_values;
  double sup = 0, mean = 0;
  for (std::size_t i = 0; i < rt.s.size(); ++i) {
    double g0 = target.g0(rt.s[i]);
    rt.g_target.push_back(g0);
    double e = std::abs(rt.g_model[i] - g0) / std::abs(g0);
    sup = std::max(sup, e);
    mean += e;
  }
  rt.sup_rel_err = sup;
  rt.mean_rel_err = mean / static_cast<double>(rt.s.size());
  return rt;
}

}  // namespace cohesive
