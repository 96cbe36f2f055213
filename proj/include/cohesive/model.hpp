#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cohesive/numerics.hpp"

namespace cohesive {

/// Outer degradation φ_deg with its limit at infinity.
struct Degradation {
  ScalarFn phi;
  double phi_inf = 1.0;
  std::string name;
};

/// φ_deg(x) = x/(1+x).
Degradation default_degradation();

struct HypothesisCheck {
  std::string name;
  bool pass = true;
  bool mandatory = true;
  double worst = 0.0;     // magnitude of the worst violation
  double location = kNaN;  // where it occurred
  std::string note;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;

  bool all_pass() const;
  bool mandatory_pass() const;
  const HypothesisCheck* find(const std::string& name) const;
  std::string summary() const;
};

class HypothesisViolation : public Error {
 public:
  HypothesisViolation(const std::string& what, HypothesisReport report)
      : Error(ErrorKind::HypothesisViolation, what), report_(std::move(report)) {}
  const HypothesisReport& report() const { return report_; }

 private:
  HypothesisReport report_;
};

struct ModelOptions {
  std::optional<ScalarFn> khat;        // analytic k̂ if known
  std::optional<ScalarFn> khat_prime;  // analytic k̂'
  std::optional<double> sigma;         // analytic σ, may be +inf
  bool check_hypotheses = true;
  int n_samples = 10000;
  std::string name;
};

/// Phase-field model ingredients with derived k̂, σ and Ψ(1).
/// Immutable after construction.
struct PhaseFieldModel {
  ScalarFn fhat;
  ScalarFn Qfun;
  ScalarFn omega;
  Degradation phi_deg;
  ScalarFn khat;
  ScalarFn khat_prime;
  bool analytic_khat_prime = false;
  double sigma = kNaN;
  double psi1 = kNaN;
  std::string name;
  HypothesisReport report;

  bool superlinear() const { return !std::isfinite(sigma); }
  double two_psi1() const { return 2 * psi1; }
  /// Ψ(t) = ∫_0^t ω^{1/2}(1-τ) dτ.
  double psi(double t) const;
  /// ∫_0^r ω^{1/2}(x) dx = Ψ(1) - Ψ(1-r), accurate for small r.
  double psi_bar(double r) const;
};

PhaseFieldModel make_model(ScalarFn fhat, ScalarFn Qfun, ScalarFn omega, Degradation phi_deg = default_degradation(),
                           ModelOptions options = {});

/// Sampled check of the model hypotheses (also run by make_model).
HypothesisReport check_model(const PhaseFieldModel& model, int n_samples = 10000);

enum class Regime { Linear, Superlinear };
const char* to_string(Regime r);

struct TargetCohesiveLaw {
  std::string name;
  ScalarFn g0;
  ScalarFn g0_prime;
  std::optional<ScalarFn> g0_second;
  std::optional<ScalarFn> g0_prime_inverse;  // analytic (g0')^{-1}
  Regime regime = Regime::Linear;
  double sigma = 1.0;  // g0'(0); +inf for superlinear
  double g_inf = kNaN;
  double s_frac0 = kNaN;  // may be +inf
  std::optional<DecayEnvelope> decay_envelope;
  std::vector<double> kinks;  // opening values where g0' has a kink
};

/// Opening s where g0' drops to ratio·σ; equals s_frac0 when that is finite and ratio=0.
double effective_s_frac(const TargetCohesiveLaw& target, double ratio = 1e-2);

HypothesisReport validate_target(const TargetCohesiveLaw& target, int n_samples = 10000);

}  // namespace cohesive
