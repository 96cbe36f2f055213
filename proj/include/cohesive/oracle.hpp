#pragma once

#include <vector>

#include "cohesive/model.hpp"

namespace cohesive {

enum class OracleMethod { Newton, CoordinateDescent };
/// Starting profile: the affine interpolant, or the profile recovered from the
/// maximizer of the discrete dual problem.
enum class OracleInit { Dual, Affine };

struct OracleConfig {
  int n_w = 2000;   // cells of the w grid
  int n_m = 200;    // m scan size
  int max_iters = 500;  // Newton iterations or descent sweeps
  double conv_tol = 1e-9;  // relative energy decrease
  OracleMethod method = OracleMethod::Newton;
  OracleInit init = OracleInit::Dual;
  bool refine = true;  // local Brent pass around the scan minimum
  int threads = 1;

  void validate() const;
};

/// Minimizer of the discretized reduced energy at fixed m.
struct DiscreteProfile {
  double m = kNaN;
  double s = kNaN;
  double energy = kNaN;
  std::vector<double> t;  // nodes on [2m-1, 1], with t = m a node
  std::vector<double> w;
  double lower_bound = kNaN;  // discrete dual value; energy - lower_bound bounds the error
  double lambda = kNaN;       // dual maximizer
  int iterations = 0;
  std::vector<double> energy_history;  // one entry per iteration/sweep
};

/// Nodes on [2m-1, 1], symmetric about m, cells growing by 1.05 away from m.
std::vector<double> oracle_grid(double m, int n_cells);

DiscreteProfile discrete_profile(const PhaseFieldModel& model, double m, double s, const OracleConfig& cfg = {});
double discrete_Gm(const PhaseFieldModel& model, double m, double s, int n_w = 2000);

struct OracleResult {
  double g = kNaN;
  double argmin_m = kNaN;
  std::vector<double> m_grid;
  std::vector<double> energies;
};

OracleResult discrete_g(const PhaseFieldModel& model, double s, const OracleConfig& cfg = {});

/// Minimum of φ_deg(1/τ)t² + ς²τ/4 over τ = 0 and a log grid of n_tau points on [1e-8, 1e8].
double discrete_h_sigma(const Degradation& phi_deg, double varsigma, double t, int n_tau = 1000000);

}  // namespace cohesive
