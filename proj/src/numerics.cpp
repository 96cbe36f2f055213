#include "cohesive/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

// pchip.hpp calls unqualified isnan.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace cohesive {

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!(lo < hi)) {
    std::ostringstream os;
    os << "interval requires lo < hi, got [" << lo << ", " << hi << "]";
    throw Error(ErrorKind::DomainError, os.str());
  }
}

namespace {

struct Segment {
  double a, b, value, error, l1;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// GK15 on [a,b]. Kronrod nodes at odd indices, Gauss nodes at even ones.
Segment gk15(const ScalarFn& h, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  static const auto& xk = GK::abscissa();
  static const auto& wk = GK::weights();
  static const auto& wg = G::weights();

  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  auto eval = [&](double x) {
    double y = h(x);
    if (!std::isfinite(y)) {
      std::ostringstream os;
      os << "integrand is " << y << " at t=" << x;
      throw Error(ErrorKind::NonFinite, os.str());
    }
    return y;
  };
  double fc = eval(c);
  double k = fc * wk[0];
  double g = fc * wg[0];
  double l1 = std::abs(fc) * wk[0];
  for (std::size_t i = 1; i < xk.size(); ++i) {
    double f1 = eval(c - r * xk[i]);
    double f2 = eval(c + r * xk[i]);
    k += (f1 + f2) * wk[i];
    l1 += (std::abs(f1) + std::abs(f2)) * wk[i];
    if (i % 2 == 0) g += (f1 + f2) * wg[i / 2];
  }
  return {a, b, k * r, std::abs((k - g) * r), l1 * std::abs(r)};
}

}  // namespace

QuadResult integrate_adaptive_ex(const ScalarFn& h, Interval iv, const QuadratureSpec& spec) {
  if (!(spec.abs_tol > 0) || !(spec.rel_tol > 0)) {
    throw Error(ErrorKind::DomainError, "quadrature tolerances must be positive");
  }
  const double eps = std::numeric_limits<double>::epsilon();
  std::priority_queue<Segment> heap;
  Segment s0 = gk15(h, iv.lo, iv.hi);
  double total = s0.value, err = s0.error, l1 = s0.l1;
  std::vector<Segment> segs;
  heap.push(s0);
  int subdivisions = 0;
  const double min_width = 64 * eps * std::max(std::abs(iv.lo), std::abs(iv.hi));
  while (!heap.empty()) {
    double target = std::max({spec.abs_tol, spec.rel_tol * std::abs(total), 50 * eps * l1});
    if (err <= target) break;
    if (subdivisions >= spec.max_subdivisions) {
      std::ostringstream os;
      os << "subdivision budget exhausted on [" << iv.lo << ", " << iv.hi << "], value " << total
         << ", error estimate " << err;
      throw Error(ErrorKind::NonConvergent, os.str());
    }
    Segment s = heap.top();
    heap.pop();
    double mid = 0.5 * (s.a + s.b);
    if (s.b - s.a <= min_width || mid <= s.a || mid >= s.b) {
      // Too narrow to split further; its error is at rounding level.
      segs.push_back(s);
      continue;
    }
    Segment left = gk15(h, s.a, mid);
    Segment right = gk15(h, mid, s.b);
    total += left.value + right.value - s.value;
    err += left.error + right.error - s.error;
    l1 += left.l1 + right.l1 - s.l1;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  while (!heap.empty()) {
    segs.push_back(heap.top());
    heap.pop();
  }
  // Re-sum in order so the result does not depend on the update history.
  std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  double sum = 0.0, esum = 0.0;
  for (const auto& s : segs) {
    sum += s.value;
    esum += s.error;
  }
  return {sum, esum, subdivisions};
}

double integrate_adaptive(const ScalarFn& h, Interval iv, const QuadratureSpec& spec) {
  return integrate_adaptive_ex(h, iv, spec).value;
}

double integrate_left_sqrt_singular(const ScalarFn& h, Interval iv, const QuadratureSpec& spec) {
  double h0 = h(iv.lo);
  if (!std::isfinite(h0)) throw Error(ErrorKind::NonFinite, "h is unbounded at the singular endpoint");
  const double lo = iv.lo;
  return integrate_adaptive([&](double u) { return 2.0 * h(lo + u * u); },
                            Interval(0.0, std::sqrt(iv.length())), spec);
}

double integrate_right_sqrt_singular(const ScalarFn& h, Interval iv, const QuadratureSpec& spec) {
  double h1 = h(iv.hi);
  if (!std::isfinite(h1)) throw Error(ErrorKind::NonFinite, "h is unbounded at the singular endpoint");
  const double hi = iv.hi;
  return integrate_adaptive([&](double u) { return 2.0 * h(hi - u * u); },
                            Interval(0.0, std::sqrt(iv.length())), spec);
}

double integrate_sqrt_endpoints(const ScalarFn& f, Interval iv, const QuadratureSpec& spec) {
  const double lo = iv.lo, hi = iv.hi;
  const double mid = lo + 0.5 * (hi - lo);
  QuadratureSpec half = spec;
  half.abs_tol = spec.abs_tol / 2;
  double left = integrate_adaptive([&](double u) { return 2.0 * u * f(lo + u * u); },
                                   Interval(0.0, std::sqrt(mid - lo)), half);
  double right = integrate_adaptive([&](double v) { return 2.0 * v * f(hi - v * v); },
                                    Interval(0.0, std::sqrt(hi - mid)), half);
  return left + right;
}

double DecayEnvelope::operator()(double t) const {
  if (kind == Kind::ExpSqrt) return C * std::exp(-rate * std::sqrt(std::max(t, 0.0)));
  return C * std::pow(t, -rate);
}

double DecayEnvelope::tail_bound(double T) const {
  if (kind == Kind::ExpSqrt) {
    // ∫_T^∞ e^{-c√t} dt = 2 e^{-c√T} (√T/c + 1/c²)
    double r = std::sqrt(T);
    return C * 2.0 * std::exp(-rate * r) * (r / rate + 1.0 / (rate * rate));
  }
  if (rate <= 1.0) return kInf;
  return C * std::pow(T, 1.0 - rate) / (rate - 1.0);
}

double DecayEnvelope::tail_bound_sqrt_kernel(double T) const {
  if (kind == Kind::ExpSqrt) {
    // ∫_T^∞ e^{-c√t} t^{-1/2} dt = (2/c) e^{-c√T}
    return C * 2.0 / rate * std::exp(-rate * std::sqrt(T));
  }
  if (rate <= 0.5) return kInf;
  return C * std::pow(T, 0.5 - rate) / (rate - 0.5);
}

double DecayEnvelope::truncation_point(double lo, double bound, bool sqrt_kernel) const {
  auto tb = [&](double T) { return sqrt_kernel ? tail_bound_sqrt_kernel(T) : tail_bound(T); };
  double a = std::max(lo, 1.0);
  if (tb(a) <= bound) return a;
  double b = 2 * a;
  int guard = 0;
  while (tb(b) > bound) {
    a = b;
    b *= 2;
    if (++guard > 200) throw Error(ErrorKind::NonConvergent, "envelope tail never drops below the bound");
  }
  for (int i = 0; i < 60; ++i) {
    double m = 0.5 * (a + b);
    if (tb(m) > bound) a = m; else b = m;
  }
  return b;
}

double integrate_tail(const ScalarFn& h, double lo, const DecayEnvelope& env,
                      const QuadratureSpec& spec, bool sqrt_kernel) {
  double T = env.truncation_point(lo, spec.abs_tol / 10, sqrt_kernel);
  if (T <= lo) return 0.0;
  // Envelope check in the far region.
  for (int i = 1; i <= 16; ++i) {
    double t = lo + (T - lo) * (0.5 + 0.5 * i / 16.0);
    if (t <= 0) continue;
    double v = std::abs(h(t));
    double e = env(t);
    if (v > 10 * e && v > 1e-300) {
      std::ostringstream os;
      os << "|h(" << t << ")| = " << v << " exceeds the declared envelope " << e;
      throw Error(ErrorKind::EnvelopeViolated, os.str());
    }
  }
  if (sqrt_kernel) {
    // t = u^2 removes the kernel singularity at the origin.
    double u0 = std::sqrt(std::max(lo, 0.0));
    return integrate_adaptive([&](double u) { return 2.0 * h(u * u); }, Interval(u0, std::sqrt(T)), spec);
  }
  // t = lo + u^2 handles a square-root singularity at lo and compresses the range.
  return integrate_adaptive([&](double u) { return 2.0 * u * h(lo + u * u); },
                            Interval(0.0, std::sqrt(T - lo)), spec);
}

double brent_root(const ScalarFn& h, double lo, double hi, double tol) {
  double flo = h(lo), fhi = h(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if (std::isnan(flo) || std::isnan(fhi) || (flo > 0) == (fhi > 0)) {
    std::ostringstream os;
    os << "h(" << lo << ")=" << flo << " and h(" << hi << ")=" << fhi << " have the same sign";
    throw Error(ErrorKind::NoBracket, os.str());
  }
  std::uintmax_t max_iter = 500;
  auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  auto r = boost::math::tools::toms748_solve(h, lo, hi, flo, fhi, stop, max_iter);
  double a = r.first, b = r.second;
  if (std::abs(b - a) > tol && max_iter >= 500) {
    throw Error(ErrorKind::NonConvergent, "root finder did not reach the requested bracket width");
  }
  double fa = h(a), fb = h(b);
  return std::abs(fa) <= std::abs(fb) ? a : b;
}

std::pair<double, double> minimize_scalar(const ScalarFn& f, double lo, double hi, int bits,
                                          int max_iter) {
  std::uintmax_t it = static_cast<std::uintmax_t>(max_iter);
  auto r = boost::math::tools::brent_find_minima(f, lo, hi, std::min(bits, 52), it);
  return {r.first, r.second};
}

// ---------------------------------------------------------------------------

namespace {

using Pchip = boost::math::interpolators::pchip<std::vector<double>>;

void check_monotone(const std::vector<double>& v, Monotone flag) {
  if (flag == Monotone::None) return;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    bool ok = flag == Monotone::Increasing ? v[i + 1] > v[i] : v[i + 1] < v[i];
    if (!ok) {
      std::ostringstream os;
      os << "values not strictly " << (flag == Monotone::Increasing ? "increasing" : "decreasing")
         << " at index " << i << " (" << v[i] << ", " << v[i + 1] << ")";
      throw Error(ErrorKind::NotMonotone, os.str());
    }
  }
}

std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> xs = x, ys = y;
  Pchip p(std::move(xs), std::move(ys));
  std::vector<double> s(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) s[i] = p.prime(x[i]);
  return s;
}

}  // namespace

SampledFunction::SampledFunction(std::vector<double> grid, std::vector<double> values,
                                 Monotone flag, Interp interp)
    : flag_(flag), interp_(interp) {
  if (grid.size() != values.size()) throw Error(ErrorKind::DomainError, "grid and values differ in length");
  if (grid.size() < 4) throw Error(ErrorKind::DomainError, "a sampled function needs at least 4 nodes");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i + 1] > grid[i])) throw Error(ErrorKind::DomainError, "grid must be strictly increasing");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "sampled function value is not finite");
  }
  check_monotone(values, flag);
  std::vector<double> slopes;
  if (interp == Interp::Pchip) {
    slopes = pchip_slopes(grid, values);
  } else {
    slopes.assign(grid.size(), 0.0);
  }
  grid_ = std::make_shared<const std::vector<double>>(std::move(grid));
  values_ = std::make_shared<const std::vector<double>>(std::move(values));
  slopes_ = std::make_shared<const std::vector<double>>(std::move(slopes));
}

std::size_t SampledFunction::cell(double x) const {
  const auto& g = *grid_;
  auto it = std::upper_bound(g.begin(), g.end(), x);
  std::size_t i = static_cast<std::size_t>(it - g.begin());
  if (i == 0) return 0;
  if (i >= g.size()) return g.size() - 2;
  return i - 1;
}

double SampledFunction::operator()(double x) const {
  const auto& g = *grid_;
  const auto& v = *values_;
  if (std::isnan(x)) return kNaN;
  if (x <= g.front()) return v.front();
  if (x >= g.back()) return v.back();
  std::size_t i = cell(x);
  double h = g[i + 1] - g[i];
  double t = (x - g[i]) / h;
  if (interp_ == Interp::Linear) return v[i] + t * (v[i + 1] - v[i]);
  const auto& s = *slopes_;
  double t2 = t * t, t3 = t2 * t;
  double h00 = 2 * t3 - 3 * t2 + 1;
  double h10 = t3 - 2 * t2 + t;
  double h01 = -2 * t3 + 3 * t2;
  double h11 = t3 - t2;
  return h00 * v[i] + h10 * h * s[i] + h01 * v[i + 1] + h11 * h * s[i + 1];
}

double SampledFunction::derivative(double x) const {
  const auto& g = *grid_;
  const auto& v = *values_;
  if (x < g.front() || x > g.back()) return 0.0;
  std::size_t i = cell(x);
  double h = g[i + 1] - g[i];
  if (interp_ == Interp::Linear) return (v[i + 1] - v[i]) / h;
  const auto& s = *slopes_;
  double t = (x - g[i]) / h;
  double t2 = t * t;
  double d00 = 6 * t2 - 6 * t;
  double d10 = 3 * t2 - 4 * t + 1;
  double d01 = -6 * t2 + 6 * t;
  double d11 = 3 * t2 - 2 * t;
  return (d00 * v[i] + d01 * v[i + 1]) / h + d10 * s[i] + d11 * s[i + 1];
}

double SampledFunction::solve(double y) const {
  if (flag_ == Monotone::None) throw Error(ErrorKind::NotMonotone, "solve requires a monotone tabulation");
  const auto& g = *grid_;
  const auto& v = *values_;
  bool inc = flag_ == Monotone::Increasing;
  double vmin = inc ? v.front() : v.back();
  double vmax = inc ? v.back() : v.front();
  if (y <= vmin) return inc ? g.front() : g.back();
  if (y >= vmax) return inc ? g.back() : g.front();
  std::size_t i;
  if (inc) {
    i = static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), y) - v.begin()) - 1;
  } else {
    i = static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), y, std::greater<double>()) - v.begin()) - 1;
  }
  if (v[i] == y) return g[i];
  double tol = 4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(g[i]), std::abs(g[i + 1]));
  tol = std::max(tol, 1e-300);
  return brent_root([&](double x) { return (*this)(x) - y; }, g[i], g[i + 1], tol);
}

SampledFunction tabulate(const ScalarFn& f, const std::vector<double>& grid, Monotone flag) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
  return SampledFunction(grid, std::move(v), flag);
}

SampledFunction invert_monotone(const SampledFunction& sf) {
  if (sf.monotone() == Monotone::None) throw Error(ErrorKind::NotMonotone, "cannot invert a non-monotone tabulation");
  std::vector<double> x = sf.values();
  std::vector<double> y = sf.grid();
  Monotone flag = Monotone::Increasing;
  if (sf.monotone() == Monotone::Decreasing) {
    std::reverse(x.begin(), x.end());
    std::reverse(y.begin(), y.end());
    flag = Monotone::Decreasing;
  }
  return SampledFunction(std::move(x), std::move(y), flag, sf.interpolation());
}

SampledFunction lower_convex_envelope(const std::vector<double>& grid, const std::vector<double>& values) {
  if (grid.size() != values.size() || grid.size() < 2) {
    throw Error(ErrorKind::DomainError, "convex envelope needs matching grid and values");
  }
  // Monotone chain lower hull.
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    while (hull.size() >= 2) {
      std::size_t a = hull[hull.size() - 2], b = hull.back();
      double cross = (grid[b] - grid[a]) * (values[i] - values[a]) - (values[b] - values[a]) * (grid[i] - grid[a]);
      if (cross <= 0) hull.pop_back(); else break;
    }
    hull.push_back(i);
  }
  std::vector<double> env(grid.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    while (k + 1 < hull.size() && grid[hull[k + 1]] < grid[i]) ++k;
    std::size_t a = hull[k];
    std::size_t b = hull[std::min(k + 1, hull.size() - 1)];
    if (a == b || grid[i] == grid[a]) {
      env[i] = values[a];
    } else {
      double w = (grid[i] - grid[a]) / (grid[b] - grid[a]);
      env[i] = values[a] + w * (values[b] - values[a]);
    }
    env[i] = std::min(env[i], values[i]);
  }
  if (grid.size() < 4) {
    // Pad so the tabulation holds at least four nodes.
    std::vector<double> g2, v2;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      for (int j = 0; j < 3; ++j) {
        double w = j / 3.0;
        g2.push_back(grid[i] + w * (grid[i + 1] - grid[i]));
        v2.push_back(env[i] + w * (env[i + 1] - env[i]));
      }
    }
    g2.push_back(grid.back());
    v2.push_back(env.back());
    return SampledFunction(std::move(g2), std::move(v2), Monotone::None, Interp::Linear);
  }
  return SampledFunction(grid, std::move(env), Monotone::None, Interp::Linear);
}

std::vector<double> cosine_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double c = 0.5 * (1.0 - std::cos(M_PI * i / (n - 1)));
    g[static_cast<std::size_t>(i)] = lo + (hi - lo) * c;
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> chebyshev_interior(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double c = 0.5 * (1.0 - std::cos(M_PI * (i + 0.5) / n));
    g[static_cast<std::size_t>(i)] = lo + (hi - lo) * c;
  }
  return g;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  if (n > 0) g.back() = hi;
  return g;
}

std::vector<double> merge_points(std::vector<double> grid, const std::vector<double>& extra, double min_gap) {
  for (double x : extra) {
    if (x <= grid.front() || x >= grid.back()) continue;
    auto it = std::lower_bound(grid.begin(), grid.end(), x);
    bool close = (it != grid.end() && std::abs(*it - x) < min_gap) ||
                 (it != grid.begin() && std::abs(*(it - 1) - x) < min_gap);
    if (close) {
      // Snap the nearest node onto the breakpoint.
      auto nearest = it;
      if (it == grid.end() || (it != grid.begin() && std::abs(*(it - 1) - x) < std::abs(*it - x))) nearest = it - 1;
      if (nearest != grid.begin() && nearest + 1 != grid.end()) *nearest = x;
      continue;
    }
    grid.insert(it, x);
  }
  return grid;
}

double numeric_derivative(const ScalarFn& f, double x, double lo, double hi) {
  double h = 1e-6 * (hi - lo);
  if (x - h >= lo && x + h <= hi) return (f(x + h) - f(x - h)) / (2 * h);
  if (x - h < lo) return (-3 * f(x) + 4 * f(x + h) - f(x + 2 * h)) / (2 * h);
  return (3 * f(x) - 4 * f(x - h) + f(x - 2 * h)) / (2 * h);
}

double aitken_limit(const std::vector<double>& seq) {
  if (seq.empty()) return kNaN;
  if (seq.size() < 3) return seq.back();
  double a = seq[seq.size() - 3], b = seq[seq.size() - 2], c = seq.back();
  double d1 = b - a, d2 = c - b;
  if (d1 == 0 || d2 == 0) return c;
  double r = d2 / d1;
  if (!(r > 0 && r < 0.95)) return c;
  double lim = c + d2 * r / (1 - r);
  if (!std::isfinite(lim)) return c;
  return lim;
}

bool looks_divergent(const std::vector<double>& seq, double ratio) {
  if (seq.size() < 4) return false;
  std::size_t n = seq.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(seq[i + 1] > seq[i])) return false;
  }
  double d_first = seq[n - 3] - seq[n - 4];
  double d_last = seq[n - 1] - seq[n - 2];
  return d_last >= ratio * d_first;
}

}  // namespace cohesive
