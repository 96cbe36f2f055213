#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cohesive/model.hpp"
#include "cohesive/numerics.hpp"

namespace cohesive {

inline const QuadratureSpec kAbelSpec{1e-13, 1e-11, 1 << 14};

struct RFunction {
  Regime regime = Regime::Linear;
  ScalarFn R;
  ScalarFn R_prime;
  ScalarFn s_of_t;            // opening s with R(t) = g0(s)
  double sigma2 = kNaN;       // right end of the domain (linear), +inf otherwise
  double R_at_sigma2 = kNaN;  // linear: g0((s*)0)
  double R0 = kNaN;           // superlinear: R(0+) = g0(inf)
  std::vector<double> breakpoints;   // kinks of R' in t
  std::optional<DecayEnvelope> envelope;  // superlinear bound on |R'|
};

RFunction build_R(const TargetCohesiveLaw& target);

/// Exponent α of R' ~ (σ²-t)^{-α} near σ², from two probe points.
double blowup_exponent(const RFunction& R);

/// φ(τ) = (1/π)∫_0^τ R'(t)(τ-t)^{-1/2} dt.
double abel_invert_linear(const RFunction& R, double tau, const QuadratureSpec& spec = kAbelSpec);
/// φ(τ) = -(1/π)∫_τ^∞ R'(t)(t-τ)^{-1/2} dt.
double abel_invert_super(const RFunction& R, double tau, const QuadratureSpec& spec = kAbelSpec);
/// ∫_0^t φ(τ)(t-τ)^{-1/2} dτ, split at the kinks `breaks` of φ.
double abel_forward_linear(const ScalarFn& phi, double t, const std::vector<double>& breaks = {},
                           const QuadratureSpec& spec = kAbelSpec);
/// ∫_t^T φ(τ)(τ-t)^{-1/2} dτ with T the truncation point.
double abel_forward_super(const ScalarFn& phi, double t, double T, const std::vector<double>& breaks = {},
                          const QuadratureSpec& spec = kAbelSpec);

/// φ tabulated against u = √τ, where it is smooth for both regimes.
struct SmallPhi {
  Regime regime = Regime::Linear;
  SampledFunction table;  // φ(u²) on [0, √T_max]
  double T_max = kNaN;    // end of the tabulated range in τ
  bool truncated = false;  // linear grid stopped short of σ² because R' blows up
  std::optional<DecayEnvelope> tail;
  ScalarFn direct;  // superlinear: exact φ beyond T_max

  double operator()(double tau) const;
};

/// Truncation point where the superlinear φ integrals become negligible.
double super_truncation(const RFunction& R, double bound = 1e-14);
SmallPhi tabulate_phi(const RFunction& R, int n_nodes = 512, int threads = 1);

struct FixedIngredient {
  std::string kind;  // "khat" or "omega"
  std::string description;
};

struct ReconstructionDiagnostics {
  double abel_roundtrip_err = kNaN;
  double forward_roundtrip_err = kNaN;
  double forward_roundtrip_mean = kNaN;
  HypothesisReport hypothesis_report;
  double phi0_times_pi = kNaN;  // superlinear: compare with (s*)0
  double s_frac0 = kNaN;
  double compatibility_gap = kNaN;  // |2Ψ0(1) - g0(inf)|
  double blowup_exponent = kNaN;
  bool phi_truncated = false;
};

struct ReconstructionResult {
  FixedIngredient fixed;
  Regime regime = Regime::Linear;
  std::string produced_name;  // "omega0(1-t)", "fhat0_inverse" or "khat0_inverse"
  SampledFunction produced;
  std::optional<SampledFunction> produced_direct;  // f̂0 or k̂0 tabulated
  SmallPhi phi;
  double sigma_scaling = 1.0;
  ReconstructionDiagnostics diagnostics;
  PhaseFieldModel model;
};

struct ReconstructOptions {
  int n_nodes = 512;
  int threads = 1;
  bool abel_check = true;
  int abel_check_points = 41;
  bool check_model = true;
  bool forward_check = false;  // fills forward_roundtrip_* (runs the forward engine)
  int forward_check_points = 25;
};

/// Theorem route with k̂0 fixed: produces ω0. `khat0` is the shape with k̂0(1)=1
/// in the linear regime (it is normalized if not).
ReconstructionResult omega_from_khat(const TargetCohesiveLaw& target, const ScalarFn& khat0,
                                     std::optional<ScalarFn> sqrt_khat0_prime = std::nullopt,
                                     const ReconstructOptions& opt = {});
/// Theorem route with ω0 fixed: produces f̂0^{-1} (linear) or k̂0^{-1} (superlinear).
ReconstructionResult khat_from_omega(const TargetCohesiveLaw& target, const ScalarFn& omega0,
                                     const ReconstructOptions& opt = {});
/// Exports a unit-σ reconstruction for critical stress σ: ω := σ²ω̃, Q := ω̃.
ReconstructionResult rescale_sigma(const ReconstructionResult& unit, double sigma);

/// Superlinear model with k̂ and ω given: f̂ = min(k̂, 1), Q(y) = ω(y) f̂(1-y)/k̂(1-y).
PhaseFieldModel assemble_superlinear_model(const ScalarFn& omega, const ScalarFn& khat, const ScalarFn& khat_prime,
                                           const std::string& name, bool check = true);

/// Exponential law with g0' linearized to zero past the opening where g0' = √δ.
/// δ = 0 gives the unregularized law.
TargetCohesiveLaw regularize_exponential(double k, double delta);

struct RoundTrip {
  double sup_rel_err = kNaN;
  double mean_rel_err = kNaN;
  std::vector<double> s;
  std::vector<double> g_target;
  std::vector<double> g_model;
};

RoundTrip round_trip(const TargetCohesiveLaw& target, const ReconstructionResult& result,
                     const std::vector<double>& s_grid, int threads = 1);

}  // namespace cohesive
