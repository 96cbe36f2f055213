#include "cohesive/forward.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <sstream>

#include "cohesive/parallel.hpp"

namespace cohesive {

const char* to_string(PhiClass c) {
  switch (c) {
    case PhiClass::StrictlyDecreasing: return "strictly_decreasing";
    case PhiClass::NonDecreasing: return "non_decreasing";
    case PhiClass::NonMonotone: return "non_monotone";
  }
  return "unknown";
}

namespace {

constexpr double kLogSwitch = 0.99;
constexpr double kLogMax = 34.5;  // 1-t = e^{-34.5} ≈ 1e-15

struct Ctx {
  const PhaseFieldModel& M;
  double m, L, kh_m, kp_m, delta;
};

double khat_at(const PhaseFieldModel& M, double t) {
  if (t >= 1) return M.sigma * M.sigma;
  double k = M.khat(t);
  if (!std::isfinite(k) && std::isfinite(M.sigma)) return M.sigma * M.sigma;
  return k;
}

Ctx make_ctx(const PhaseFieldModel& M, double m, double lam) {
  if (!(m > 0 && m < 1)) {
    std::ostringstream os;
    os << "m must lie in (0,1), got " << m;
    throw Error(ErrorKind::DomainError, os.str());
  }
  double kh_m = M.khat(m);
  double lam2 = lam * lam;
  if (lam < 0 || lam2 > kh_m * (1 + 1e-12)) {
    std::ostringstream os;
    os << "lambda^2 = " << lam2 << " exceeds khat(m) = " << kh_m << " at m = " << m;
    throw Error(ErrorKind::DomainError, os.str());
  }
  double delta = std::max(kh_m - lam2, 0.0);
  double kp = M.khat_prime(m);
  return {M, m, 1 - m, kh_m, kp, delta};
}

// k̂(t) - k̂(m) with dt = t - m known exactly; integrates k̂' when the
// difference would cancel.
double khat_gap(const Ctx& c, double dt, double kh) {
  double D = kh - c.kh_m;
  if (c.M.analytic_khat_prime && std::abs(D) < 1e-3 * c.kh_m && dt > 0) {
    const auto& kp = c.M.khat_prime;
    D = dt * boost::math::quadrature::gauss<double, 15>::integrate([&](double x) { return kp(c.m + dt * x); }, 0.0, 1.0);
  }
  return D;
}

// Integrates over [m,1]. f(t, r, kh, D, isd, uf) returns the integrand, where
// r = 1-t, D = k̂(t)-λ², isd = u/√D and uf = u on the piece t = m+u² (isd = 1/√D,
// uf = 1 elsewhere). The Jacobian of the substitution is applied here.
template <class F>
double integrate_m1(const Ctx& c, F f, const QuadratureSpec& spec) {
  const auto& M = c.M;
  const double half = c.L / 2;
  QuadratureSpec sp = spec;
  sp.abs_tol = spec.abs_tol / 3;

  auto left = [&](double u) {
    double u2 = u * u;
    double t = c.m + u2;
    double r = c.L - u2;
    double kh = khat_at(M, t);
    double Dm = (c.kp_m * u2 < 1e-6 * c.kh_m && !M.analytic_khat_prime) ? c.kp_m * u2 : khat_gap(c, u2, kh);
    if (!(Dm > 0)) Dm = c.kp_m * u2;
    double D = Dm + c.delta;
    double isd = u == 0 ? (c.delta > 0 ? 0.0 : 1 / std::sqrt(c.kp_m)) : u / std::sqrt(D);
    return 2.0 * f(t, r, kh, D, isd, u);
  };
  double total = integrate_adaptive(left, Interval(0.0, std::sqrt(half)), sp);

  auto plain = [&](double t, double r, double jac) {
    double kh = khat_at(M, t);
    double D = khat_gap(c, c.L - r, kh) + c.delta;
    if (!(D > 0)) return 0.0;
    return jac * f(t, r, kh, D, 1 / std::sqrt(D), 1.0);
  };
  if (std::isfinite(M.sigma)) {
    auto right = [&](double v) {
      double r = v * v;
      return plain(1 - r, r, 2 * v);
    };
    total += integrate_adaptive(right, Interval(0.0, std::sqrt(half)), sp);
  } else {
    double mid = c.m + half;
    double start = mid;
    if (mid < kLogSwitch) {
      total += integrate_adaptive([&](double t) { return plain(t, 1 - t, 1.0); }, Interval(mid, kLogSwitch), sp);
      start = kLogSwitch;
    }
    double x0 = -std::log1p(-start);
    if (x0 < kLogMax) {
      auto tail = [&](double x) {
        double r = std::exp(-x);
        return plain(1 - r, r, r);
      };
      total += integrate_adaptive(tail, Interval(x0, kLogMax), sp);
    }
  }
  return total;
}

}  // namespace

double big_B(const PhaseFieldModel& M, double m, double lam, bool* diverged) {
  if (diverged) *diverged = false;
  if (lam == 0) return 0.0;
  Ctx c = make_ctx(M, m, lam);
  if (c.delta == 0 && !(c.kp_m > 0 && std::isfinite(c.kp_m))) {
    if (diverged) *diverged = true;
    return kInf;
  }
  try {
    return integrate_m1(
        c,
        [&](double, double r, double kh, double, double isd, double) {
          double w = std::max(M.omega(r), 0.0);
          return 2 * lam * std::sqrt(w / kh) * isd;
        },
        kForwardSpec);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NonFinite && c.delta == 0) {
      if (diverged) *diverged = true;
      return kInf;
    }
    throw;
  }
}

double big_A(const PhaseFieldModel& M, double m, double lam) {
  Ctx c = make_ctx(M, m, lam);
  return integrate_m1(
      c,
      [&](double, double r, double kh, double D, double, double uf) {
        double w = std::max(M.omega(r), 0.0);
        return 2 * std::sqrt(D * w / kh) * uf;
      },
      kForwardSpec);
}

double direct_energy(const PhaseFieldModel& M, double m, double lam) {
  Ctx c = make_ctx(M, m, lam);
  return integrate_m1(
      c,
      [&](double, double r, double kh, double, double isd, double) {
        double w = std::max(M.omega(r), 0.0);
        return 2 * std::sqrt(kh * w) * isd;
      },
      kForwardSpec);
}

double capital_phi(const PhaseFieldModel& M, double m) {
  if (!(m > 0 && m < 1)) throw Error(ErrorKind::DomainError, "Phi is defined on (0,1)");
  return big_B(M, m, std::sqrt(M.khat(m)));
}

namespace {

double endpoint_limit(const PhaseFieldModel& M, bool at_zero) {
  std::vector<double> seq;
  for (int j = 8; j <= 40; j += 4) {
    double m = at_zero ? std::ldexp(1.0, -j) : 1 - std::ldexp(1.0, -j);
    try {
      seq.push_back(capital_phi(M, m));
    } catch (const Error& e) {
      // the ingredients stop resolving 1-m near the end; keep what converged
      if (e.kind() != ErrorKind::NonConvergent || seq.size() < 3) throw;
      break;
    }
  }
  if (at_zero && looks_divergent(seq, 0.5)) return kInf;
  for (double v : seq) {
    if (!std::isfinite(v)) return kInf;
  }
  return aitken_limit(seq);
}

}  // namespace

PhiTable phi_table(const PhaseFieldModel& M, int n_nodes, int threads) {
  n_nodes = std::max(n_nodes, 8);
  std::vector<double> m = chebyshev_interior(0.0, 1.0, n_nodes);
  std::vector<double> v(m.size());
  parallel_for(m.size(), threads, [&](std::size_t i) { v[i] = capital_phi(M, m[i]); });

  PhiTable pt;
  double vmax = 0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  double tol = 1e-9 * std::max(vmax, 1e-300);
  bool dec = true, nondec = true, strict = true;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    double d = v[i + 1] - v[i];
    if (d > tol) dec = false;
    if (d < -tol) nondec = false;
    if (!(d < 0)) strict = false;
  }
  if (dec && !nondec) pt.classification = PhiClass::StrictlyDecreasing;
  else if (nondec) pt.classification = PhiClass::NonDecreasing;
  else pt.classification = PhiClass::NonMonotone;
  Monotone flag = (pt.classification == PhiClass::StrictlyDecreasing && strict) ? Monotone::Decreasing : Monotone::None;
  pt.table = SampledFunction(m, v, flag);

  pt.phi0plus = endpoint_limit(M, true);
  pt.phi1minus = endpoint_limit(M, false);
  if (pt.classification == PhiClass::StrictlyDecreasing) {
    pt.phi1minus = std::max(pt.phi1minus, 0.0);
    if (pt.phi0plus < v.front()) pt.phi0plus = v.front();
  }

  double h = 1e-6;
  double d0 = std::sqrt(M.khat(h)) / h;
  double w1 = M.omega(1.0);
  pt.closed_form_phi0plus = M_PI * std::sqrt(std::max(w1, 0.0)) / (2 * d0);

  // Parametric convexity of t ↦ (Ψ(t), k̂^{1/2}(t)).
  const int nc = 200;
  std::vector<double> ts = linspace(0.0, 1.0 - 1e-3, nc), psi(nc), sk(nc);
  for (int i = 0; i < nc; ++i) {
    psi[i] = M.psi(ts[i]);
    sk[i] = std::sqrt(M.khat(ts[i]));
  }
  bool convex = true;
  double prev = kNaN;
  for (int i = 0; i + 1 < nc; ++i) {
    double slope = (sk[i + 1] - sk[i]) / (psi[i + 1] - psi[i]);
    if (std::isfinite(prev) && slope < prev - 1e-9 * std::abs(prev)) convex = false;
    prev = slope;
  }
  pt.convexity_criterion = convex;
  return pt;
}

double solve_lambda(const PhaseFieldModel& M, double m, double s) {
  double lmax = std::sqrt(M.khat(m));
  double phi = big_B(M, m, lmax);
  if (s > phi * (1 + 1e-14)) {
    std::ostringstream os;
    os << "s = " << s << " exceeds Phi(m) = " << phi << "; the minimizer jumps";
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  if (s <= 0) return 0.0;
  if (s >= phi) return lmax;
  return brent_root([&](double lam) { return big_B(M, m, lam) - s; }, 0.0, lmax, 1e-12 * lmax);
}

double energy_gs(const PhaseFieldModel& M, double m, double s) {
  double lmax = std::sqrt(M.khat(m));
  double phi = big_B(M, m, lmax);
  if (phi >= s) {
    double lam = s >= phi ? lmax : brent_root([&](double l) { return big_B(M, m, l) - s; }, 0.0, lmax, 1e-12 * lmax);
    return big_A(M, m, lam) + lam * s;
  }
  return big_A(M, m, lmax) + lmax * s;
}

double energy_gs_direct(const PhaseFieldModel& M, double m, double s) {
  double lmax = std::sqrt(M.khat(m));
  double phi = big_B(M, m, lmax);
  if (phi >= s) {
    double lam = solve_lambda(M, m, s);
    return direct_energy(M, m, lam);
  }
  return direct_energy(M, m, lmax) + lmax * (s - phi);
}

// ---------------------------------------------------------------------------

ForwardSolver::ForwardSolver(PhaseFieldModel model, int n_nodes, int threads)
    : model_(std::move(model)), phi_(phi_table(model_, n_nodes, threads)) {}

double ForwardSolver::s_frac() const {
  switch (phi_.classification) {
    case PhiClass::StrictlyDecreasing: return phi_.phi0plus;
    case PhiClass::NonDecreasing: return model_.two_psi1() / model_.sigma;
    case PhiClass::NonMonotone: return kNaN;
  }
  return kNaN;
}

double ForwardSolver::m_star(double s) const {
  if (phi_.classification != PhiClass::StrictlyDecreasing) return kNaN;
  if (!(s > phi_.phi1minus && s < phi_.phi0plus)) return kNaN;
  const auto& M = model_;
  const auto& m = phi_.table.grid();
  const auto& v = phi_.table.values();
  auto f = [&](double x) { return capital_phi(M, x) - s; };
  const double tol = 1e-14;
  if (s >= v.front()) {
    double lo = kMMin;
    if (f(lo) <= 0) return lo;
    return brent_root(f, lo, m.front(), tol);
  }
  if (s <= v.back()) {
    double hi = 1 - kMMin;
    if (f(hi) >= 0) return hi;
    return brent_root(f, m.back(), hi, tol);
  }
  std::size_t i = static_cast<std::size_t>(
      std::upper_bound(v.begin(), v.end(), s, std::greater<double>()) - v.begin());
  // v[i-1] >= s > v[i]
  return brent_root(f, m[i - 1], m[i], tol);
}

double ForwardSolver::scan_minimum(double s, double* argmin) const {
  const auto& M = model_;
  std::vector<double> m = chebyshev_interior(0.0, 1.0, 1024);
  double best = kInf;
  std::size_t ib = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    double e = energy_gs(M, m[i], s);
    if (e < best) {
      best = e;
      ib = i;
    }
  }
  double lo = m[ib == 0 ? 0 : ib - 1], hi = m[std::min(ib + 1, m.size() - 1)];
  double xb = m[ib];
  if (hi > lo) {
    auto r = minimize_scalar([&](double x) { return energy_gs(M, x, s); }, lo, hi, 30, 60);
    if (r.second < best) {
      best = r.second;
      xb = r.first;
    }
  }
  if (argmin) *argmin = xb;
  double limit = std::min(M.two_psi1(), std::isfinite(M.sigma) ? M.sigma * s : kInf);
  if (limit <= best) {
    if (argmin) *argmin = kNaN;
    return limit;
  }
  return best;
}

double ForwardSolver::g_value(double s) const {
  if (s <= 0) return 0.0;
  const auto& M = model_;
  switch (phi_.classification) {
    case PhiClass::NonDecreasing:
      if (M.superlinear()) throw Error(ErrorKind::Unsupported, "non-decreasing Phi requires a finite sigma");
      return std::min(M.sigma * s, M.two_psi1());
    case PhiClass::NonMonotone:
      if (M.superlinear()) throw Error(ErrorKind::Unsupported, "non-monotone Phi with infinite sigma");
      return scan_minimum(s, nullptr);
    case PhiClass::StrictlyDecreasing:
      break;
  }
  if (s >= phi_.phi0plus) return M.two_psi1();
  if (s <= phi_.phi1minus) return M.sigma * s;
  double m = m_star(s);
  double lmax = std::sqrt(M.khat(m));
  if (m <= kMMin || m >= 1 - kMMin) return energy_gs(M, m, s);
  return big_A(M, m, lmax) + lmax * s;
}

double ForwardSolver::g_derivative(double s) const {
  const auto& M = model_;
  switch (phi_.classification) {
    case PhiClass::NonDecreasing:
      if (M.superlinear()) throw Error(ErrorKind::Unsupported, "non-decreasing Phi requires a finite sigma");
      return s < M.two_psi1() / M.sigma ? M.sigma : 0.0;
    case PhiClass::NonMonotone: {
      double h = 1e-5 * std::max(1.0, s);
      double lo = std::max(0.0, s - h);
      return (g_value(s + h) - g_value(lo)) / (s + h - lo);
    }
    case PhiClass::StrictlyDecreasing:
      break;
  }
  if (s <= 0) return M.sigma;
  if (s >= phi_.phi0plus) return 0.0;
  if (s <= phi_.phi1minus) return M.sigma;
  return std::sqrt(M.khat(m_star(s)));
}

CohesiveCurve ForwardSolver::cohesive_curve(const std::vector<double>& s_grid, int threads) const {
  CohesiveCurve c;
  c.s_grid = s_grid;
  c.g_values.assign(s_grid.size(), kNaN);
  c.g_prime_values.assign(s_grid.size(), kNaN);
  c.m_star_values.assign(s_grid.size(), kNaN);
  parallel_for(s_grid.size(), threads, [&](std::size_t i) {
    double s = s_grid[i];
    c.g_values[i] = g_value(s);
    c.g_prime_values[i] = g_derivative(s);
    c.m_star_values[i] = m_star(s);
  });
  c.s_frac = s_frac();
  c.two_psi1 = model_.two_psi1();
  c.best_effort = best_effort();
  return c;
}

double g_value(const PhaseFieldModel& model, double s) { return ForwardSolver(model).g_value(s); }
double g_derivative(const PhaseFieldModel& model, double s) { return ForwardSolver(model).g_derivative(s); }
CohesiveCurve cohesive_curve(const PhaseFieldModel& model, const std::vector<double>& s_grid, int threads) {
  return ForwardSolver(model, 512, threads).cohesive_curve(s_grid, threads);
}

// ---------------------------------------------------------------------------

OptimalProfile optimal_profile(const PhaseFieldModel& M, double m, double s, int n) {
  if (!(s > 0)) throw Error(ErrorKind::DomainError, "profile requires s > 0");
  n = std::max(n, 8);
  OptimalProfile p;
  p.m = m;
  p.s = s;
  double lmax = std::sqrt(M.khat(m));
  double phi = big_B(M, m, lmax);
  double wplus;
  if (s <= phi) {
    p.lambda = solve_lambda(M, m, s);
    p.regularity = Regularity::W11;
    p.jump = 0.0;
    wplus = s / 2;
  } else {
    p.lambda = lmax;
    p.regularity = Regularity::SBV_jump;
    p.jump = s - phi;
    wplus = s - phi / 2;
  }
  Ctx c = make_ctx(M, m, p.lambda);
  const double lam = p.lambda;
  // Slope integrand in u, t = m + u²: 2u w'(t).
  auto slope = [&](double u) {
    double u2 = u * u;
    double t = m + u2;
    double r = std::max(c.L - u2, 0.0);
    double kh = khat_at(M, t);
    double Dm = (c.kp_m * u2 < 1e-6 * c.kh_m && !M.analytic_khat_prime) ? c.kp_m * u2 : khat_gap(c, u2, kh);
    if (!(Dm > 0)) Dm = c.kp_m * u2;
    double D = Dm + c.delta;
    double isd = u == 0 ? (c.delta > 0 ? 0.0 : 1 / std::sqrt(c.kp_m)) : u / std::sqrt(D);
    if (!std::isfinite(kh) || kh <= 0) return 0.0;
    return 2 * lam * std::sqrt(std::max(M.omega(r), 0.0) / kh) * isd;
  };
  std::vector<double> u = linspace(0.0, std::sqrt(c.L), n);
  std::vector<double> tr(u.size()), wr(u.size());
  double acc = wplus;
  const QuadratureSpec spec{1e-12, 1e-10, 1 << 14};
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (j > 0) acc += integrate_adaptive(slope, Interval(u[j - 1], u[j]), spec);
    tr[j] = m + u[j] * u[j];
    wr[j] = acc;
  }
  tr.back() = 1.0;
  // Odd extension: w(m - d) = s - w(m + d).
  for (std::size_t j = u.size(); j-- > 0;) {
    if (j == 0 && p.jump == 0) continue;
    p.t_samples.push_back(2 * m - tr[j]);
    p.w_samples.push_back(s - wr[j]);
  }
  for (std::size_t j = 0; j < u.size(); ++j) {
    p.t_samples.push_back(tr[j]);
    p.w_samples.push_back(wr[j]);
  }
  return p;
}

double g_hat(const PhaseFieldModel& M, double s) {
  if (!M.superlinear()) throw Error(ErrorKind::WrongRegime, "g_hat is defined for infinite sigma");
  if (s <= 0) return 0.0;
  auto F = [&](double lx) {
    double x = std::pow(10.0, lx);
    x = std::min(x, 1.0);
    double kh = x >= 1 ? 0.0 : M.khat(1 - x);
    return 2 * M.psi_bar(x) + std::sqrt(std::max(kh, 0.0)) * s;
  };
  std::vector<double> lx = linspace(-14.0, 0.0, 141);
  double best = kInf;
  std::size_t ib = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    double v = F(lx[i]);
    if (v < best) {
      best = v;
      ib = i;
    }
  }
  double lo = lx[ib == 0 ? 0 : ib - 1], hi = lx[std::min(ib + 1, lx.size() - 1)];
  if (hi > lo) {
    auto r = minimize_scalar(F, lo, hi, 40, 100);
    best = std::min(best, r.second);
  }
  return std::min(best, M.two_psi1());
}

double h_sigma(const Degradation& phi, double vs, double t) {
  if (vs == 0 || t == 0) return 0.0;
  if (std::isinf(vs)) return phi.phi_inf * t * t;
  auto F = [&](double lt) {
    double tau = std::exp(lt);
    return phi.phi(1 / tau) * t * t + vs * vs * tau / 4;
  };
  std::vector<double> lt = linspace(-12 * M_LN10, 12 * M_LN10, 241);
  double best = kInf;
  std::size_t ib = 0;
  for (std::size_t i = 0; i < lt.size(); ++i) {
    double v = F(lt[i]);
    if (v < best) {
      best = v;
      ib = i;
    }
  }
  double lo = lt[ib == 0 ? 0 : ib - 1], hi = lt[std::min(ib + 1, lt.size() - 1)];
  auto r = minimize_scalar(F, lo, hi, 52, 200);
  best = std::min(best, r.second);
  return std::min(best, phi.phi_inf * t * t);
}

SampledFunction h_sigma_envelope(const Degradation& phi, double vs, const std::vector<double>& t_grid) {
  std::vector<double> v(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) v[i] = h_sigma(phi, vs, t_grid[i]);
  return lower_convex_envelope(t_grid, v);
}

}  // namespace cohesive
