#pragma once

#include <string>
#include <vector>

#include "cohesive/model.hpp"
#include "cohesive/numerics.hpp"

namespace cohesive {

/// Tolerances used by the energy integrals.
inline const QuadratureSpec kForwardSpec{1e-12, 1e-10, 1 << 14};

/// B(m,λ) = 2∫_m^1 [λ²ω(1-t)/(k̂(t)(k̂(t)-λ²))]^{1/2} dt.
/// Returns +inf (and sets *diverged) when the threshold integral diverges.
double big_B(const PhaseFieldModel& model, double m, double lam, bool* diverged = nullptr);
/// A(m,λ) = 2∫_m^1 [(k̂(t)-λ²)ω(1-t)/k̂(t)]^{1/2} dt.
double big_A(const PhaseFieldModel& model, double m, double lam);
/// 2∫_m^1 [k̂ω(1-t)/(k̂-λ²)]^{1/2} dt, the energy of the absolutely continuous part.
double direct_energy(const PhaseFieldModel& model, double m, double lam);
/// Φ(m) = B(m, k̂^{1/2}(m)).
double capital_phi(const PhaseFieldModel& model, double m);

enum class PhiClass { StrictlyDecreasing, NonDecreasing, NonMonotone };
const char* to_string(PhiClass c);

struct PhiTable {
  SampledFunction table;
  double phi0plus = kNaN;
  double phi1minus = kNaN;
  PhiClass classification = PhiClass::NonMonotone;
  /// π ω^{1/2}(1) / (2 (k̂^{1/2})'(0+)); reported only, never used.
  double closed_form_phi0plus = kNaN;
  /// Sampled convexity of (k̂∘Ψ^{-1})^{1/2}, a sufficient condition for strict decrease.
  bool convexity_criterion = false;
};

PhiTable phi_table(const PhaseFieldModel& model, int n_nodes = 512, int threads = 1);

/// λ in (0, k̂^{1/2}(m)] with B(m,λ) = s.
double solve_lambda(const PhaseFieldModel& model, double m, double s);
/// 𝔊_s(m): minimal energy at fixed m.
double energy_gs(const PhaseFieldModel& model, double m, double s);
/// 𝔊_s(m) through the direct singular integral (cross-check of energy_gs).
double energy_gs_direct(const PhaseFieldModel& model, double m, double s);

struct CohesiveCurve {
  std::vector<double> s_grid;
  std::vector<double> g_values;
  std::vector<double> g_prime_values;
  std::vector<double> m_star_values;
  double s_frac = kNaN;
  double two_psi1 = kNaN;
  bool best_effort = false;
};

enum class Regularity { W11, SBV_jump };

struct OptimalProfile {
  double m = kNaN;
  double s = kNaN;
  double lambda = kNaN;
  Regularity regularity = Regularity::W11;
  std::vector<double> t_samples;  // on [2m-1, 1]
  std::vector<double> w_samples;
  double jump = 0.0;
};

/// Evaluates g, g' and m_s for one model, caching its Φ table.
class ForwardSolver {
 public:
  explicit ForwardSolver(PhaseFieldModel model, int n_nodes = 512, int threads = 1);

  double g_value(double s) const;
  double g_derivative(double s) const;
  /// Φ^{-1}(s) clamped to [m_min, 1-m_min]; NaN outside (Φ(1-), Φ(0+)).
  double m_star(double s) const;
  CohesiveCurve cohesive_curve(const std::vector<double>& s_grid, int threads = 1) const;

  const PhaseFieldModel& model() const { return model_; }
  const PhiTable& phi() const { return phi_; }
  bool best_effort() const { return phi_.classification == PhiClass::NonMonotone; }
  double s_frac() const;

  static constexpr double kMMin = 1e-6;

 private:
  double scan_minimum(double s, double* argmin) const;

  PhaseFieldModel model_;
  PhiTable phi_;
};

double g_value(const PhaseFieldModel& model, double s);
double g_derivative(const PhaseFieldModel& model, double s);
CohesiveCurve cohesive_curve(const PhaseFieldModel& model, const std::vector<double>& s_grid, int threads = 1);

OptimalProfile optimal_profile(const PhaseFieldModel& model, double m, double s, int n_samples = 201);

/// Upper bound ĝ(s) of the superlinear regime.
double g_hat(const PhaseFieldModel& model, double s);

/// h_ς(t) = inf_τ φ_deg(1/τ) t² + ς²τ/4.
double h_sigma(const Degradation& phi_deg, double varsigma, double t);
SampledFunction h_sigma_envelope(const Degradation& phi_deg, double varsigma, const std::vector<double>& t_grid);

}  // namespace cohesive
