#pragma once

#include "mdplab/treatments.hpp"
#include "mdplab/variance.hpp"

#include <string>
#include <vector>

namespace mdplab {

struct Check {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string relation;  // "==", "<=", "<"
  bool pass = false;
};

struct ComparisonVerdict {
  std::vector<Check> checks;
  bool all_pass() const;
  int failures() const;
};

// Variance orderings between designs for every ordered pair of distinct arms.
// Single-state specs are checked at the crucial state, others at every state.
ComparisonVerdict compare_variances(const Experiment& exp, double tol = 1e-9);

// Necessary conditions for hom(IS) == hom(AB) in a two-arm single-state spec.
struct EqualityDiagnostics {
  bool zero_noise_off_crucial = false;
  bool rho_proportional = false;
  double kappa = 0.0;
  double hom_is = 0.0;
  double hom_ab = 0.0;
  bool hom_equal = false;
  // hom_equal implies both conditions
  bool consistent() const { return !hom_equal || (zero_noise_off_crucial && rho_proportional); }
};

EqualityDiagnostics equality_diagnostics(const Experiment& exp, double tol = 1e-9);

struct MonotonicityResult {
  int arm = 0;
  double delta_crucial = 0.0;
  double worst_sign = 0.0;   // most negative sign-adjusted Delta(s)
  double worst_bound = 0.0;  // largest |Delta(s)| - gamma |Delta(crucial)|
  bool strict = true;        // bound held strictly at every state
  bool pass = false;
};

// Single-state specs only; each treatment arm against control.
std::vector<MonotonicityResult> monotonicity_check(const Experiment& exp, double tol = 1e-9);

struct PdlResult {
  int arm = 0;
  double residual_treatment = 0.0;  // |Delta - rho^t A^c|_inf
  double residual_control = 0.0;    // |Delta + rho^c A^t|_inf
};

// Performance-difference identities, each treatment arm against control.
std::vector<PdlResult> pdl_check(const Experiment& exp);

// |A A# A - A|, |A# A A# - A#|, |A A# - A# A| for A = I - P.
struct GroupInverseResiduals {
  double first = 0.0;
  double second = 0.0;
  double commute = 0.0;
};
GroupInverseResiduals group_inverse_residuals(const Matrix& P);

// |mu1^T - mu0^T - mu1^T (P1 - P0)(I - P0)#|_inf
double stationary_perturbation_residual(const Matrix& P0, const Matrix& P1);

}  // namespace mdplab
