#pragma once

#include "mdplab/simulate.hpp"
#include "mdplab/variance.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mdplab {

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

struct EstimateReport {
  std::string estimator;
  std::string target;  // "V" or "ATE(i,j)"
  int arm_i = -1;
  int arm_j = -1;
  Vector point;
  // Asymptotic variance of sqrt(T)(estimate - truth), per state.
  std::optional<Vector> plug_in_variance;
  std::optional<std::vector<Interval>> ci95;
  std::vector<std::string> flags;
  std::size_t T = 0;
  std::string inputs_hash;
};

EstimateReport estimate_mb(const Trajectory& traj, double gamma, bool plug_in = true);
// Least-squares fixed point of the TD objective, solved via its normal equations.
EstimateReport estimate_td(const Trajectory& traj, double gamma);

// Per-arm value estimates; pairwise differences are the ATE estimates, which
// keeps antisymmetry exact.
struct AteEstimate {
  std::string estimator;
  std::vector<Vector> arm_values;
  std::vector<std::string> flags;
  std::size_t T = 0;
  std::string inputs_hash;
  Design design = Design::AB;
  std::optional<DesignTerms> plug_in;  // empirical ingredients, absent when unavailable

  Vector ate(int i, int j) const { return arm_values.at(i) - arm_values.at(j); }
  std::optional<double> plug_in_variance_at(int i, int j, int x) const;
  EstimateReport report(int i, int j) const;
};

AteEstimate estimate_ab(const Trajectory& traj, const Experiment& exp);
AteEstimate estimate_is(const Trajectory& traj, const Experiment& exp);
// `traj` must come from the treatment-only randomization.
AteEstimate estimate_pi(const Trajectory& traj, const Experiment& exp);
AteEstimate estimate_naive(const Trajectory& traj, const Experiment& exp);
AteEstimate estimate_dq(const Trajectory& traj, const Experiment& exp);
AteEstimate estimate_dq_is(const Trajectory& traj, const Experiment& exp);

// Lookahead Q(a) = r(a) + gamma P(a) V for one action's row set.
Vector q_lookahead(const Vector& r_a, const Matrix& P_a, const Vector& V, double gamma);

std::string trajectory_hash(const Trajectory& traj);

}  // namespace mdplab
