#include "cohesive/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cohesive/reconstruct.hpp"

namespace cohesive {

namespace {

constexpr double kSignTol = 1e-9;
const QuadratureSpec kPsiSpec{1e-13, 1e-12, 1 << 14};

}  // namespace

Degradation default_degradation() {
  return {[](double x) { return std::isinf(x) ? 1.0 : x / (1 + x); }, 1.0, "x/(1+x)"};
}

bool HypothesisReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.pass; });
}

bool HypothesisReport::mandatory_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.pass || !c.mandatory; });
}

const HypothesisCheck* HypothesisReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string HypothesisReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << c.name << ": " << (c.pass ? "pass" : "FAIL");
    if (!c.pass) {
      os << " (worst " << c.worst;
      if (std::isfinite(c.location)) os << " at " << c.location;
      if (!c.note.empty()) os << "; " << c.note;
      os << ")";
    }
    os << "\n";
  }
  return os.str();
}

const char* to_string(Regime r) { return r == Regime::Linear ? "linear" : "superlinear"; }

double PhaseFieldModel::psi_bar(double r) const {
  if (r <= 0) return 0.0;
  r = std::min(r, 1.0);
  const auto& w = omega;
  // x = u^2 handles ω ~ x^α at the origin.
  return integrate_adaptive([&w](double u) { return 2 * u * std::sqrt(std::max(w(u * u), 0.0)); },
                            Interval(0.0, std::sqrt(r)), kPsiSpec);
}

double PhaseFieldModel::psi(double t) const {
  if (t <= 0) return 0.0;
  if (t >= 1) return psi1;
  if (t > 0.5) return psi1 - psi_bar(1 - t);
  const auto& w = omega;
  return integrate_sqrt_endpoints([&w](double x) { return std::sqrt(std::max(w(x), 0.0)); }, Interval(1 - t, 1.0),
                                  kPsiSpec);
}

namespace {

// Tracks the worst violation of a sampled sign condition.
struct Tracker {
  HypothesisCheck c;
  void fail(double magnitude, double where, const std::string& note) {
    if (c.pass || magnitude > c.worst) {
      c.worst = magnitude;
      c.location = where;
      c.note = note;
    }
    c.pass = false;
  }
};

double estimate_sigma(const ScalarFn& khat) {
  std::vector<double> seq;
  for (int j = 8; j <= 20; ++j) seq.push_back(khat(1 - std::ldexp(1.0, -j)));
  for (double v : seq) {
    if (!std::isfinite(v)) return kInf;
  }
  bool increasing = true;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) increasing = increasing && seq[i + 1] > seq[i];
  if ((seq.back() > 1e8 && increasing) || looks_divergent(seq)) return kInf;
  double s2 = aitken_limit(seq);
  return std::sqrt(std::max(s2, 0.0));
}

}  // namespace

HypothesisReport check_model(const PhaseFieldModel& m, int n) {
  HypothesisReport rep;
  n = std::max(n, 16);

  Tracker hp1{{"Hp1", true, true, 0, kNaN, ""}};
  if (std::abs(m.fhat(1.0) - 1.0) > kSignTol) hp1.fail(std::abs(m.fhat(1.0) - 1.0), 1.0, "fhat(1) != 1");
  if (std::abs(m.fhat(0.0)) > kSignTol) hp1.fail(std::abs(m.fhat(0.0)), 0.0, "fhat(0) != 0");
  if (std::abs(m.Qfun(0.0)) > kSignTol) hp1.fail(std::abs(m.Qfun(0.0)), 0.0, "Q(0) != 0");
  Tracker hp2{{"Hp2", true, true, 0, kNaN, ""}};
  if (std::abs(m.omega(0.0)) > kSignTol) hp2.fail(std::abs(m.omega(0.0)), 0.0, "omega(0) != 0");

  for (int i = 1; i <= n; ++i) {
    double t = static_cast<double>(i) / n;
    double f = m.fhat(t), q = m.Qfun(t), w = m.omega(t);
    if (!(f > 0)) hp1.fail(std::abs(f), t, "fhat vanishes away from 0");
    if (!(q > 0)) hp1.fail(std::abs(q), t, "Q vanishes away from 0");
    if (!(w > 0)) hp2.fail(std::abs(w), t, "omega vanishes away from 0");
  }
  const int nq = 500;
  for (int i = 0; i < nq; ++i) {
    double a = 0.05 * i / nq, b = 0.05 * (i + 1) / nq;
    double d = m.Qfun(b) - m.Qfun(a);
    if (d < -kSignTol) hp1.fail(-d, a, "Q not increasing near 0");
  }
  rep.checks.push_back(hp1.c);
  rep.checks.push_back(hp2.c);

  Tracker hp5{{"Hp5", true, true, 0, kNaN, ""}};
  Tracker hp5p{{"Hp5'", true, false, 0, kNaN, ""}};
  if (std::abs(m.khat(0.0)) > kSignTol) hp5.fail(std::abs(m.khat(0.0)), 0.0, "khat(0) != 0");
  double prev = m.khat(0.0);
  for (int i = 1; i < n; ++i) {
    double t = static_cast<double>(i) / n;
    double k = m.khat(t);
    if (!std::isfinite(k)) {
      hp5.fail(kInf, t, "khat not finite");
      continue;
    }
    double tol = kSignTol * std::max(1.0, std::abs(k));
    if (!(k - prev > -tol)) hp5.fail(prev - k, t, "khat not increasing");
    prev = k;
    if ((i % 10) == 0) {
      double kp = m.khat_prime(t);
      if (!(kp > 0)) hp5p.fail(std::abs(kp), t, "khat' not positive");
    }
  }
  rep.checks.push_back(hp5.c);
  rep.checks.push_back(hp5p.c);

  HypothesisCheck sig{"sigma", m.sigma > 0, true, 0, kNaN, ""};
  if (!sig.pass) {
    sig.worst = std::abs(m.sigma);
    sig.note = "sigma must be positive";
  }
  rep.checks.push_back(sig);
  HypothesisCheck psi{"Psi1", m.psi1 > 0 && std::isfinite(m.psi1), true, 0, kNaN, ""};
  if (!psi.pass) {
    psi.worst = std::abs(m.psi1);
    psi.note = "Psi(1) must be positive and finite";
  }
  rep.checks.push_back(psi);
  return rep;
}

PhaseFieldModel make_model(ScalarFn fhat, ScalarFn Qfun, ScalarFn omega, Degradation phi_deg, ModelOptions opt) {
  PhaseFieldModel m;
  m.fhat = std::move(fhat);
  m.Qfun = std::move(Qfun);
  m.omega = std::move(omega);
  m.phi_deg = std::move(phi_deg);
  m.name = opt.name;
  if (opt.khat) {
    m.khat = *opt.khat;
  } else {
    auto f = m.fhat, q = m.Qfun, w = m.omega;
    m.khat = [f, q, w](double t) {
      double x = 1 - t;
      return w(x) * f(t) / q(x);
    };
  }
  if (opt.khat_prime) {
    m.khat_prime = *opt.khat_prime;
    m.analytic_khat_prime = true;
  } else {
    auto k = m.khat;
    m.khat_prime = [k](double t) { return numeric_derivative(k, t, 0.0, 1.0); };
  }
  m.sigma = opt.sigma ? *opt.sigma : estimate_sigma(m.khat);
  if (m.omega) {
    try {
      m.psi1 = m.psi_bar(1.0);
    } catch (const Error&) {
      m.psi1 = kNaN;
    }
  }
  if (opt.check_hypotheses) {
    m.report = check_model(m, opt.n_samples);
    if (!m.report.mandatory_pass()) {
      throw HypothesisViolation("model hypotheses violated:\n" + m.report.summary(), m.report);
    }
  }
  return m;
}

double effective_s_frac(const TargetCohesiveLaw& t, double ratio) {
  if (std::isfinite(t.s_frac0) && ratio <= 0) return t.s_frac0;
  double level = ratio * (std::isfinite(t.sigma) ? t.sigma : t.g0_prime(1e-12));
  double hi = std::isfinite(t.s_frac0) ? t.s_frac0 : 1.0;
  if (std::isfinite(t.s_frac0) && t.g0_prime(hi) > level) return hi;
  int guard = 0;
  while (t.g0_prime(hi) > level) {
    hi *= 2;
    if (++guard > 200) throw Error(ErrorKind::NonConvergent, "g0' does not decay");
  }
  return brent_root([&](double s) { return t.g0_prime(s) - level; }, 0.0, hi, 1e-14 * hi);
}

HypothesisReport validate_target(const TargetCohesiveLaw& t, int n) {
  HypothesisReport rep;
  n = std::max(n, 16);
  const bool linear = t.regime == Regime::Linear;
  double S;
  try {
    S = std::isfinite(t.s_frac0) ? t.s_frac0 : effective_s_frac(t, 1e-4);
  } catch (const Error&) {
    S = 1.0;
  }
  const double scale = std::max(1.0, std::abs(t.g_inf));

  Tracker hp6{{linear ? "Hp6" : "Hp6'", true, true, 0, kNaN, ""}};
  if (std::abs(t.g0(0.0)) > kSignTol) hp6.fail(std::abs(t.g0(0.0)), 0.0, "g0(0) != 0");
  if (!std::isfinite(t.g_inf)) hp6.fail(kInf, kInf, "g0 unbounded");
  double prev = t.g0(0.0);
  for (int i = 1; i <= 2 * n; ++i) {
    double s = 2 * S * i / (2.0 * n);
    double g = t.g0(s);
    if (g - prev < -kSignTol * scale) hp6.fail(prev - g, s, "g0 decreasing");
    if (std::isfinite(t.g_inf) && g > t.g_inf + kSignTol * scale) hp6.fail(g - t.g_inf, s, "g0 exceeds g0(inf)");
    prev = g;
  }
  rep.checks.push_back(hp6.c);

  // Shared samples of g0' on (0, S].
  std::vector<double> s(static_cast<std::size_t>(n) + 1), d(s.size()), g(s.size());
  for (int i = 0; i <= n; ++i) {
    s[i] = S * i / n;
    d[i] = t.g0_prime(i == 0 ? (linear ? 0.0 : S * 1e-9) : s[i]);
    g[i] = t.g0(s[i]);
  }

  Tracker hp7{{linear ? "Hp7" : "Hp7'", true, true, 0, kNaN, ""}};
  for (int i = 1; i < n; ++i) {
    double dd = g[i + 1] - 2 * g[i] + g[i - 1];
    if (dd > kSignTol * scale) hp7.fail(dd, s[i], "g0 not concave");
  }
  if (linear) {
    if (std::abs(d[0] - t.sigma) > 1e-6 * t.sigma) hp7.fail(std::abs(d[0] - t.sigma), 0.0, "g0'(0) != sigma");
    for (int i = 0; i + 1 < n; ++i) {
      if (!(d[i + 1] < d[i])) hp7.fail(d[i + 1] - d[i], s[i], "g0' not strictly decreasing");
    }
    // Continuity of g0' on [0, 2S]: cells with a large change are bisected;
    // a jump survives refinement, a steep but continuous slope does not.
    const double big = 1e-2 * t.sigma;
    double dprev = t.g0_prime(0.0);
    for (int i = 1; i <= 2 * n; ++i) {
      double b = 2 * S * i / (2.0 * n);
      double db = t.g0_prime(b);
      if (std::abs(db - dprev) > big) {
        double a = 2 * S * (i - 1) / (2.0 * n), da = dprev, hi = b, dh = db;
        for (int k = 0; k < 40; ++k) {
          double mid = 0.5 * (a + hi), dm = t.g0_prime(mid);
          if (std::abs(dm - da) >= std::abs(dh - dm)) {
            hi = mid;
            dh = dm;
          } else {
            a = mid;
            da = dm;
          }
        }
        if (std::abs(dh - da) > 0.5 * big) hp7.fail(std::abs(dh - da), a, "g0' not continuous");
      }
      dprev = db;
    }
  } else {
    std::vector<double> seq;
    for (int j = 10; j <= 50; j += 5) seq.push_back(t.g0_prime(std::ldexp(S, -j)));
    if (!looks_divergent(seq, 0.5)) hp7.fail(seq.back(), 0.0, "g0'(0+) appears finite");
    if (!std::isfinite(t.s_frac0)) hp7.fail(kInf, kInf, "(s*)0 must be finite");
    for (int i = 2; i < n; ++i) {
      double dd = d[i + 1] - 2 * d[i] + d[i - 1];
      double tol = kSignTol * std::max(1.0, std::abs(d[i]));
      if (dd < -tol) hp7.fail(-dd, s[i], "g0' not convex");
    }
    double g2 = t.g0_second ? (*t.g0_second)(S * (1 - 1e-9))
                            : numeric_derivative(t.g0_prime, S * (1 - 1e-6), 0.0, S * (1 - 1e-6));
    if (!(g2 < 0)) hp7.fail(std::abs(g2), S, "g0'' must be negative at (s*)0");
  }
  rep.checks.push_back(hp7.c);

  if (linear) {
    Tracker hp8{{"Hp8", true, false, 0, kNaN, ""}};
    try {
      RFunction R = build_R(t);
      double s2 = R.sigma2;
      double rp_prev = R.R_prime(0.0);
      for (int i = 1; i < n; ++i) {
        double x = s2 * (1 - 1e-6) * i / (n - 1.0);
        double rp = R.R_prime(x);
        double tol = kSignTol * std::max(1.0, std::abs(rp));
        if (rp - rp_prev < -tol) hp8.fail(rp_prev - rp, x, "R not convex");
        rp_prev = rp;
      }
      double alpha = blowup_exponent(R);
      if (alpha > 0.45) {
        std::ostringstream os;
        os << "R' blows up like (sigma^2-t)^-" << alpha << ", not in L^p for p>2";
        hp8.fail(alpha, s2, os.str());
      }
    } catch (const Error& e) {
      hp8.fail(kInf, kNaN, e.what());
    }
    rep.checks.push_back(hp8.c);
  }
  return rep;
}

}  // namespace cohesive
