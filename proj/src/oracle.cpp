#include "cohesive/oracle.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numeric>
#include <string>

#include "cohesive/parallel.hpp"

namespace cohesive {

namespace {

constexpr double kRatio = 1.05;

/// Cell coefficients: energy density h·sqrt(a d² + b) with d the slope.
struct Cells {
  std::vector<double> h, a, b;
};

Cells make_cells(const PhaseFieldModel& model, const std::vector<double>& t, double m) {
  const std::size_t n = t.size() - 1;
  Cells c;
  c.h.resize(n);
  c.a.resize(n);
  c.b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mid = 0.5 * (t[i] + t[i + 1]);
    double r = mid >= m ? mid : 2 * m - mid;  // even extension about m
    r = std::min(r, 1.0);
    c.h[i] = t[i + 1] - t[i];
    c.a[i] = model.khat(r);
    c.b[i] = model.omega(1 - r);
    if (!(c.a[i] > 0) || !(c.b[i] > 0) || !std::isfinite(c.a[i]) || !std::isfinite(c.b[i]))
      throw Error(ErrorKind::NonFinite, "oracle cell coefficient not positive at t=" + std::to_string(r));
  }
  return c;
}

double energy(const Cells& c, const std::vector<double>& w) {
  double e = 0;
  for (std::size_t i = 0; i < c.h.size(); ++i) {
    double d = (w[i + 1] - w[i]) / c.h[i];
    e += c.h[i] * std::sqrt(c.a[i] * d * d + c.b[i]);
  }
  return e;
}

/// Thomas algorithm for a symmetric tridiagonal system (diag, off), in place on rhs.
void solve_tridiagonal(std::vector<double> diag, const std::vector<double>& off, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    double f = off[i - 1] / diag[i - 1];
    diag[i] -= f * off[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
}

/// Step p solving the tridiagonal system with cell curvatures `curv`.
std::vector<double> tridiagonal_step(const std::vector<double>& grad, const std::vector<double>& curv) {
  const std::size_t n = grad.size();
  std::vector<double> diag(n), off(n > 0 ? n - 1 : 0), p(n);
  double dmax = 0;
  for (std::size_t j = 0; j < n; ++j) {
    diag[j] = curv[j] + curv[j + 1];
    dmax = std::max(dmax, diag[j]);
    if (j + 1 < n) off[j] = -curv[j + 1];
    p[j] = -grad[j];
  }
  for (double& x : diag) x += 1e-14 * dmax;
  solve_tridiagonal(diag, off, p);
  return p;
}

/// Damped Newton on the exact tridiagonal Hessian. Each iteration also forms the
/// step of the quadratic majorizer sqrt(z) ≤ sqrt(z0) + (z-z0)/(2 sqrt(z0)),
/// which decreases the energy at full length; the lower of the two is kept.
void newton(const Cells& c, std::vector<double>& w, double lower, const OracleConfig& cfg, DiscreteProfile& out) {
  const std::size_t n = c.h.size();  // cells; unknowns are w[1..n-1]
  std::vector<double> flux(n), curv(n), major(n), grad(n - 1), trial(w.size()), best(w.size());
  double e = energy(c, w);
  out.energy_history.push_back(e);
  auto apply = [&](const std::vector<double>& p, double alpha, std::vector<double>& into) {
    into = w;
    for (std::size_t j = 0; j < p.size(); ++j) into[j + 1] += alpha * p[j];
    return energy(c, into);
  };
  for (int it = 0; it < cfg.max_iters; ++it) {
    if (e - lower <= cfg.conv_tol * e) return;
    for (std::size_t i = 0; i < n; ++i) {
      double d = (w[i + 1] - w[i]) / c.h[i];
      double r = std::sqrt(c.a[i] * d * d + c.b[i]);
      flux[i] = c.a[i] * d / r;
      curv[i] = c.a[i] * c.b[i] / (r * r * r * c.h[i]);
      major[i] = c.a[i] / (r * c.h[i]);
    }
    for (std::size_t j = 0; j + 1 < n; ++j) grad[j] = flux[j] - flux[j + 1];
    std::vector<double> p = tridiagonal_step(grad, curv);
    double slope = 0;
    for (std::size_t j = 0; j < p.size(); ++j) slope += grad[j] * p[j];
    out.iterations = it + 1;
    if (-slope <= 2 * cfg.conv_tol * e) return;  // Newton decrement

    double e_best = apply(tridiagonal_step(grad, major), 1.0, best);
    double alpha = 1.0;
    for (int k = 0; k < 60; ++k, alpha *= 0.5) {
      double e_new = apply(p, alpha, trial);
      if (e_new <= e + 1e-4 * alpha * slope) {
        if (e_new < e_best) {
          e_best = e_new;
          best.swap(trial);
        }
        break;
      }
    }
    if (!(e_best < e)) {
      if (-slope <= 1e3 * cfg.conv_tol * e) return;
      throw Error(ErrorKind::NonConvergent, "oracle step failed to decrease the energy");
    }
    w.swap(best);
    double drop = e - e_best;
    e = e_best;
    out.energy_history.push_back(e);
    if (drop <= cfg.conv_tol * e && -slope <= 1e3 * cfg.conv_tol * e) return;
  }
  throw Error(ErrorKind::NonConvergent, "oracle Newton iteration limit reached");
}

/// Exact minimization in w[j] with neighbours fixed: the derivative is monotone
/// and changes sign between the neighbouring values.
double coordinate_min(const Cells& c, const std::vector<double>& w, std::size_t j) {
  const double lo = std::min(w[j - 1], w[j + 1]);
  const double hi = std::max(w[j - 1], w[j + 1]);
  if (hi - lo <= 0) return lo;
  auto dfdx = [&](double x) {
    double d1 = (x - w[j - 1]) / c.h[j - 1];
    double d2 = (w[j + 1] - x) / c.h[j];
    return c.a[j - 1] * d1 / std::sqrt(c.a[j - 1] * d1 * d1 + c.b[j - 1]) -
           c.a[j] * d2 / std::sqrt(c.a[j] * d2 * d2 + c.b[j]);
  };
  double x = w[j];
  if (x <= lo || x >= hi) x = 0.5 * (lo + hi);
  double a = lo, b = hi;
  for (int k = 0; k < 100; ++k) {
    double f = dfdx(x);
    if (f == 0) return x;
    (f > 0 ? b : a) = x;
    double d1 = (x - w[j - 1]) / c.h[j - 1];
    double d2 = (w[j + 1] - x) / c.h[j];
    double r1 = std::sqrt(c.a[j - 1] * d1 * d1 + c.b[j - 1]);
    double r2 = std::sqrt(c.a[j] * d2 * d2 + c.b[j]);
    double fp = c.a[j - 1] * c.b[j - 1] / (r1 * r1 * r1 * c.h[j - 1]) + c.a[j] * c.b[j] / (r2 * r2 * r2 * c.h[j]);
    double xn = x - f / fp;
    if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
    if (std::abs(xn - x) <= 1e-15 * std::max(1.0, std::abs(x)) || b - a <= 1e-15 * std::max(1.0, std::abs(x)))
      return xn;
    x = xn;
  }
  return x;
}

void coordinate_descent(const Cells& c, std::vector<double>& w, double lower, const OracleConfig& cfg,
                        DiscreteProfile& out) {
  double e = energy(c, w);
  out.energy_history.push_back(e);
  for (int sweep = 0; sweep < cfg.max_iters; ++sweep) {
    if (e - lower <= cfg.conv_tol * e) return;
    for (std::size_t j = 1; j + 1 < w.size(); ++j) w[j] = coordinate_min(c, w, j);
    double e_new = energy(c, w);
    out.energy_history.push_back(e_new);
    out.iterations = sweep + 1;
    if (e - e_new <= cfg.conv_tol * e_new) return;
    e = e_new;
  }
  throw Error(ErrorKind::NonConvergent, "oracle coordinate descent sweep limit reached");
}

struct Dual {
  double lambda = 0;
  double value = 0;
  std::vector<double> w;
};

/// Maximizes λs + Σ h sqrt(b(1-λ²/a)) over λ ∈ [0, sqrt(min a)], the dual of the
/// discrete energy with the end values as constraint. Its value bounds the
/// discrete minimum from below, and the slopes at the maximizer give a profile.
Dual solve_dual(const Cells& c, double s) {
  const std::size_t n = c.h.size();
  const double amin = *std::min_element(c.a.begin(), c.a.end());
  const double cap = std::sqrt(amin);
  auto slope = [&](std::size_t i, double lam) {
    return lam * std::sqrt(c.b[i]) / std::sqrt(c.a[i] * (c.a[i] - lam * lam));
  };
  auto increment = [&](double lam, bool skip_min) {
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (skip_min && c.a[i] == amin) continue;
      sum += c.h[i] * slope(i, lam);
    }
    return sum;
  };
  Dual out;
  std::vector<double> d(n);
  double rest = increment(cap, true);
  if (rest <= s) {
    // the cells where a is smallest carry the remaining increment
    out.lambda = cap;
    int count = 0;
    for (std::size_t i = 0; i < n; ++i) count += c.a[i] == amin;
    for (std::size_t i = 0; i < n; ++i) d[i] = c.a[i] == amin ? (s - rest) / count / c.h[i] : slope(i, cap);
  } else {
    double hi = cap * (1 - 1e-15);
    if (increment(hi, false) <= s) {
      out.lambda = hi;
    } else {
      // monotone but steep near the cap, where bisection is the robust choice
      auto r = boost::math::tools::bisect([&](double l) { return increment(l, false) - s; }, 0.0, hi,
                                          boost::math::tools::eps_tolerance<double>(52));
      out.lambda = 0.5 * (r.first + r.second);
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = slope(i, out.lambda);
  }
  out.value = out.lambda * s;
  for (std::size_t i = 0; i < n; ++i)
    out.value += c.h[i] * std::sqrt(c.b[i] * std::max(0.0, 1 - out.lambda * out.lambda / c.a[i]));
  out.w.resize(n + 1);
  out.w[0] = 0;
  for (std::size_t i = 0; i < n; ++i) out.w[i + 1] = out.w[i] + c.h[i] * d[i];
  // spread the rounding residual linearly so the end value is exact
  const double res = s - out.w[n];
  const double span = std::accumulate(c.h.begin(), c.h.end(), 0.0);
  double acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += c.h[i];
    out.w[i + 1] += res * acc / span;
  }
  out.w[n] = s;
  return out;
}

}  // namespace

void OracleConfig::validate() const {
  if (n_w < 64) throw Error(ErrorKind::BadParameters, "n_w must be at least 64");
  if (n_m < 16) throw Error(ErrorKind::BadParameters, "n_m must be at least 16");
  if (!(conv_tol > 0)) throw Error(ErrorKind::BadParameters, "conv_tol must be positive");
  if (max_iters < 1) throw Error(ErrorKind::BadParameters, "max_iters must be positive");
}

std::vector<double> oracle_grid(double m, int n_cells) {
  if (!(m > 0 && m < 1)) throw Error(ErrorKind::DomainError, "m must lie in (0,1)");
  const int N = std::max(n_cells / 2, 2);
  const double L = 1 - m;
  double h0 = 1e-6 * L;
  std::vector<double> h(N);
  const double geo = (std::pow(kRatio, N) - 1) / (kRatio - 1);
  if (h0 * geo <= L) {
    h0 = L / geo;
    for (int j = 0; j < N; ++j) h[j] = h0 * std::pow(kRatio, j);
  } else {
    auto total = [&](double cap) {
      double s = 0;
      for (int j = 0; j < N; ++j) s += std::min(h0 * std::pow(kRatio, j), cap);
      return s;
    };
    double lo = h0, hi = L;
    for (int k = 0; k < 200 && hi - lo > 1e-16 * L; ++k) {
      double mid = 0.5 * (lo + hi);
      (total(mid) < L ? lo : hi) = mid;
    }
    for (int j = 0; j < N; ++j) h[j] = std::min(h0 * std::pow(kRatio, j), hi);
  }
  std::vector<double> right(N + 1);
  right[0] = m;
  for (int j = 0; j < N; ++j) right[j + 1] = right[j] + h[j];
  for (int j = 0; j <= N; ++j) right[j] = m + (right[j] - m) * L / (right[N] - m);
  right[N] = 1.0;
  std::vector<double> t(2 * N + 1);
  for (int j = 0; j <= N; ++j) {
    t[N + j] = right[j];
    t[N - j] = 2 * m - right[j];
  }
  return t;
}

DiscreteProfile discrete_profile(const PhaseFieldModel& model, double m, double s, const OracleConfig& cfg) {
  cfg.validate();
  if (!(s >= 0)) throw Error(ErrorKind::DomainError, "s must be non-negative");
  DiscreteProfile out;
  out.m = m;
  out.s = s;
  out.t = oracle_grid(m, cfg.n_w);
  Cells c = make_cells(model, out.t, m);
  Dual dual = solve_dual(c, s);
  out.lower_bound = dual.value;
  out.lambda = dual.lambda;
  if (cfg.init == OracleInit::Dual) {
    out.w = dual.w;
  } else {
    const double t0 = out.t.front();
    const double span = out.t.back() - t0;
    out.w.resize(out.t.size());
    for (std::size_t i = 0; i < out.t.size(); ++i) out.w[i] = s * (out.t[i] - t0) / span;
    out.w.back() = s;
  }
  if (s > 0) {
    if (cfg.method == OracleMethod::Newton)
      newton(c, out.w, dual.value, cfg, out);
    else
      coordinate_descent(c, out.w, dual.value, cfg, out);
  }
  out.energy = energy(c, out.w);
  return out;
}

double discrete_Gm(const PhaseFieldModel& model, double m, double s, int n_w) {
  OracleConfig cfg;
  cfg.n_w = n_w;
  return discrete_profile(model, m, s, cfg).energy;
}

OracleResult discrete_g(const PhaseFieldModel& model, double s, const OracleConfig& cfg) {
  cfg.validate();
  OracleResult out;
  const int n = cfg.n_m;
  out.m_grid.resize(n);
  out.energies.resize(n);
  for (int i = 0; i < n; ++i) out.m_grid[i] = (i + 0.5) / n;
  OracleConfig inner = cfg;
  inner.threads = 1;
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    out.energies[i] = discrete_profile(model, out.m_grid[i], s, inner).energy;
  });
  auto best = std::min_element(out.energies.begin(), out.energies.end()) - out.energies.begin();
  out.g = out.energies[best];
  out.argmin_m = out.m_grid[best];
  if (cfg.refine) {
    double lo = best > 0 ? out.m_grid[best - 1] : 0.5 * out.m_grid[0];
    double hi = best + 1 < n ? out.m_grid[best + 1] : 0.5 * (1 + out.m_grid[n - 1]);
    auto [m, e] = minimize_scalar([&](double x) { return discrete_profile(model, x, s, inner).energy; }, lo, hi, 24,
                                  40);
    if (e < out.g) {
      out.g = e;
      out.argmin_m = m;
    }
  }
  return out;
}

double discrete_h_sigma(const Degradation& phi_deg, double varsigma, double t, int n_tau) {
  if (n_tau < 10000) throw Error(ErrorKind::BadParameters, "n_tau must be at least 1e4");
  if (varsigma == 0 || t == 0) return 0.0;
  if (std::isinf(varsigma)) return phi_deg.phi_inf * t * t;
  const double la = std::log(1e-8), lb = std::log(1e8);
  double best = phi_deg.phi_inf * t * t;  // τ = 0
  for (int i = 0; i < n_tau; ++i) {
    double tau = std::exp(la + (lb - la) * i / (n_tau - 1));
    best = std::min(best, phi_deg.phi(1 / tau) * t * t + 0.25 * varsigma * varsigma * tau);
  }
  return best;
}

}  // namespace cohesive
