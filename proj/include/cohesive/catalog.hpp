#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cohesive/model.hpp"
#include "cohesive/numerics.hpp"

namespace cohesive {

struct CatalogParams {
  double k = 1.0;
  double k1 = 2.0;   // bilinear
  double k2 = 0.5;   // bilinear
  double a = 0.25;   // bilinear
  std::optional<double> b;  // bilinear; fixed by continuity when omitted
  double delta = 1e-3;      // exponential
};

/// A closed-form model for one catalog law: one ingredient fixed, the other known.
struct AnalyticModel {
  std::string label;
  std::string fixed_kind;     // "khat" or "omega"
  std::string produced_kind;  // "omega0(1-t)", "fhat0_inverse" or "khat0_inverse"
  ScalarFn fixed;             // k̂0(t) or ω0(x)
  ScalarFn produced;          // closed form of the produced ingredient
  std::function<PhaseFieldModel(bool)> build;  // argument: check hypotheses
  std::optional<ScalarFn> capital_phi;        // Φ(m) in closed form

  PhaseFieldModel model(bool check = true) const { return build(check); }
};

struct CatalogEntry {
  std::string name;
  std::string description;
  CatalogParams params;
  TargetCohesiveLaw target;
  ScalarFn analytic_g;
  ScalarFn analytic_g_prime;
  std::vector<AnalyticModel> analytic_models;
  std::optional<ScalarFn> analytic_R;
  std::optional<ScalarFn> analytic_phi;
  bool dugdale = false;
  bool has_closed_forms = false;
};

CatalogEntry get(const std::string& name, const CatalogParams& params = {});
const std::vector<std::string>& names();

/// θ - sin(θ)cos(θ), accurate for small θ.
double arc_defect(double theta);
/// asin x - x(1-x²)^{1/2}.
double asin_defect(double x);
/// θ ∈ [0, π/2] with arc_defect(θ) = c.
double solve_arc_defect(double c);

}  // namespace cohesive
