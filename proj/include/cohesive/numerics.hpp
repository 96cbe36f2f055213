#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "cohesive/errors.hpp"

namespace cohesive {

using ScalarFn = std::function<double(double)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Interval {
  double lo;
  double hi;
  Interval(double lo_, double hi_);
  double length() const { return hi - lo; }
};

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 1 << 14;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature on a finite interval.
QuadResult integrate_adaptive_ex(const ScalarFn& h, Interval iv, const QuadratureSpec& spec = {});
double integrate_adaptive(const ScalarFn& h, Interval iv, const QuadratureSpec& spec = {});

/// ∫ h(t) (t-lo)^{-1/2} dt, via t = lo + u^2.
double integrate_left_sqrt_singular(const ScalarFn& h, Interval iv, const QuadratureSpec& spec = {});
/// ∫ h(t) (hi-t)^{-1/2} dt, via t = hi - u^2.
double integrate_right_sqrt_singular(const ScalarFn& h, Interval iv, const QuadratureSpec& spec = {});
/// ∫ f(t) dt where f may have square-root type behaviour at either end.
/// Each half is integrated in the variable u with t = end ± u^2.
double integrate_sqrt_endpoints(const ScalarFn& f, Interval iv, const QuadratureSpec& spec = {});

/// Declared decay of a tail integrand: C e^{-c sqrt t} or C t^{-p}.
struct DecayEnvelope {
  enum class Kind { ExpSqrt, Power };
  Kind kind = Kind::ExpSqrt;
  double C = 1.0;
  double rate = 1.0;  // c for ExpSqrt, p for Power

  static DecayEnvelope exp_sqrt(double C, double c) { return {Kind::ExpSqrt, C, c}; }
  static DecayEnvelope power(double C, double p) { return {Kind::Power, C, p}; }

  double operator()(double t) const;
  /// Bound on ∫_T^∞ envelope.
  double tail_bound(double T) const;
  /// Bound on ∫_T^∞ envelope(t) t^{-1/2}.
  double tail_bound_sqrt_kernel(double T) const;
  /// Smallest T ≥ lo (found by doubling + bisection) with tail bound below `bound`.
  double truncation_point(double lo, double bound, bool sqrt_kernel = false) const;
};

/// ∫_lo^∞ h. With sqrt_kernel, computes ∫_lo^∞ h(t) t^{-1/2} dt and the
/// envelope bounds h alone.
double integrate_tail(const ScalarFn& h, double lo, const DecayEnvelope& env,
                      const QuadratureSpec& spec = {}, bool sqrt_kernel = false);

/// Bracketed root (TOMS 748). Returns x with final bracket width ≤ tol.
double brent_root(const ScalarFn& h, double lo, double hi, double tol);

/// Minimizer of f on [lo, hi] (Brent). Returns (x, f(x)).
std::pair<double, double> minimize_scalar(const ScalarFn& f, double lo, double hi, int bits = 52,
                                          int max_iter = 200);

enum class Monotone { Increasing, Decreasing, None };
enum class Interp { Pchip, Linear };

/// Tabulated scalar function with shape-preserving interpolation.
/// Outside the grid the end values are held constant.
class SampledFunction {
 public:
  SampledFunction() = default;
  SampledFunction(std::vector<double> grid, std::vector<double> values,
                  Monotone flag = Monotone::None, Interp interp = Interp::Pchip);

  double operator()(double x) const;
  double derivative(double x) const;
  /// Solves f(x) = y on the interpolant (monotone only).
  double solve(double y) const;

  const std::vector<double>& grid() const { return *grid_; }
  const std::vector<double>& values() const { return *values_; }
  Monotone monotone() const { return flag_; }
  Interp interpolation() const { return interp_; }
  double lo() const { return grid_->front(); }
  double hi() const { return grid_->back(); }
  std::size_t size() const { return grid_ ? grid_->size() : 0; }
  bool empty() const { return size() == 0; }

 private:
  std::size_t cell(double x) const;

  std::shared_ptr<const std::vector<double>> grid_;
  std::shared_ptr<const std::vector<double>> values_;
  std::shared_ptr<const std::vector<double>> slopes_;
  Monotone flag_ = Monotone::None;
  Interp interp_ = Interp::Pchip;
};

SampledFunction tabulate(const ScalarFn& f, const std::vector<double>& grid,
                         Monotone flag = Monotone::None);

SampledFunction invert_monotone(const SampledFunction& sf);

SampledFunction lower_convex_envelope(const std::vector<double>& grid,
                                      const std::vector<double>& values);

/// n nodes on [lo, hi], endpoints included, clustered toward both ends.
std::vector<double> cosine_grid(double lo, double hi, int n);
/// n interior Chebyshev points of (lo, hi), endpoints excluded.
std::vector<double> chebyshev_interior(double lo, double hi, int n);
std::vector<double> linspace(double lo, double hi, int n);
/// Sorted union with the given points, dropping near-duplicates.
std::vector<double> merge_points(std::vector<double> grid, const std::vector<double>& extra,
                                 double min_gap);

/// Central difference with step 1e-6*(hi-lo), one-sided near the ends.
double numeric_derivative(const ScalarFn& f, double x, double lo, double hi);

/// Aitken extrapolation of a sequence assumed to converge geometrically.
double aitken_limit(const std::vector<double>& seq);
/// True when the increments of an increasing sequence do not shrink.
bool looks_divergent(const std::vector<double>& seq, double ratio = 0.9);

}  // namespace cohesive
