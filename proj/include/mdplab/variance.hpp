#pragma once

#include "mdplab/mdp.hpp"
#include "mdplab/treatments.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mdplab {

// Per-arm ingredients of the asymptotic variance formulas.
struct ArmTerms {
  Matrix P;
  Vector r;
  Vector sigma_sq;
  Vector V;
  Matrix M;  // (I - gamma P)^{-1}; rho^a(s) is column s
  Vector w;  // sigma_sq(s) + ||gamma V||^2 under Sigma_{P(s, .)}
};

ArmTerms arm_terms(const Matrix& P, const Vector& r, const Vector& sigma_sq, double gamma);

enum class Design { AB, IS, PI };
const char* design_name(Design d);

struct DesignTerms {
  double gamma = 0.0;
  int n = 0;
  std::vector<bool> crucial;
  Vector mu;     // state distribution under uniform randomization over all arms
  Vector mu_pi;  // under uniform randomization over treatment arms
  std::vector<ArmTerms> arms;
};

DesignTerms design_terms(const Experiment& exp);

struct PairCovariance {
  Matrix het;
  Matrix hom;
  Matrix full() const { return het + hom; }
};

// Full covariance of sqrt(T)(Delta_hat - Delta) for the pair (i, j),
// assembled as matrix products.
PairCovariance pair_covariance(const DesignTerms& d, Design design, int i, int j);

struct ScalarVariance {
  double het = 0.0;
  double hom = 0.0;
  double total() const { return het + hom; }
};

// The same quantity at one evaluation state, as explicit sums over rho_x.
ScalarVariance pair_variance_at(const DesignTerms& d, Design design, int i, int j, int x);

Matrix value_covariance(const ArmTerms& arm, const Vector& mu);
double value_variance_at(const ArmTerms& arm, const Vector& mu, int x);

struct VarianceReport {
  std::string estimator;
  int state = 0;
  int arm_i = -1;
  int arm_j = -1;
  Matrix full;
  double at_state = 0.0;
  std::optional<double> het;
  std::optional<double> hom;
  Vector mu;
  std::vector<Vector> rho;     // rho_x rows used in the sums
  std::vector<Vector> values;  // V of the arms involved
};

VarianceReport sigma_mb(const MdpModel& model, const PolicyMatrix& policy, int state);
// Reference covariance with i.i.d. draws from the stationary distribution.
VarianceReport sigma_gm(const MdpModel& model, const PolicyMatrix& policy, int state);

VarianceReport sigma_ab(const Experiment& exp, int i, int j, int state);
VarianceReport sigma_is(const Experiment& exp, int i, int j, int state);
VarianceReport sigma_pi(const Experiment& exp, int i, int j, int state);
VarianceReport sigma_design(const Experiment& exp, Design design, int i, int j, int state);
// Any crucial set; identical to the above, named for multi-state specs.
VarianceReport sigma_local(const Experiment& exp, Design design, int i, int j, int state);

}  // namespace mdplab
