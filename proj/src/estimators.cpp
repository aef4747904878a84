#include "mdplab/estimators.hpp"

#include "mdplab/hash.hpp"

#include <cmath>
#include <cstring>

namespace mdplab {

namespace {

std::vector<Interval> intervals(const Vector& point, const Vector& var, std::size_t T) {
  std::vector<Interval> ci(point.size());
  for (int s = 0; s < point.size(); ++s) {
    double half = kZ95 * std::sqrt(std::max(var(s), 0.0) / static_cast<double>(T));
    ci[s] = {point(s) - half, point(s) + half};
  }
  return ci;
}

void coverage_flags(const EmpiricalModel& m, const std::string& tag,
                    std::vector<std::string>& flags) {
  if (!m.complete()) flags.push_back("incomplete-coverage:" + tag);
}

ArmTerms empirical_arm(const EmpiricalModel& m, double gamma) {
  return arm_terms(m.P, m.r, m.r_var, gamma);
}

void require_arms(const Experiment& exp) {
  if (exp.num_arms() < 2) throw ModelError("ATE estimation needs at least two arms");
}

AteEstimate split_estimate(const Trajectory& traj, const Experiment& exp, SplitRule rule,
                           const char* name, Design design) {
  require_arms(exp);
  const int K = exp.num_states();
  const int n = exp.num_arms();
  SplitDatasets d = split(traj, exp, rule);
  AteEstimate est;
  est.estimator = name;
  est.design = design;
  est.T = traj.steps.size();
  est.inputs_hash = trajectory_hash(traj);
  DesignTerms terms;
  terms.gamma = exp.gamma();
  terms.n = n;
  terms.crucial = exp.crucial_mask();
  terms.mu = state_frequencies(traj);
  bool ok = true;
  for (int i = 0; i < n; ++i) {
    EmpiricalModel m = empirical_model(d.per_arm[i], K, n);
    coverage_flags(m, "arm" + std::to_string(i), est.flags);
    ok = ok && m.complete();
    ArmTerms t = empirical_arm(m, exp.gamma());
    est.arm_values.push_back(t.V);
    terms.arms.push_back(std::move(t));
  }
  if (ok) est.plug_in = std::move(terms);
  return est;
}

}  // namespace

std::string trajectory_hash(const Trajectory& traj) {
  std::uint64_t h = fnv1a64(traj.model_hash);
  h = fnv1a64(traj.policy, h);
  std::string seed = std::to_string(traj.seed) + ":" + std::to_string(traj.steps.size());
  h = fnv1a64(seed, h);
  for (const Transition& x : traj.steps) {
    char buf[sizeof(int) * 4 + sizeof(double)];
    std::memcpy(buf, &x.s, sizeof(int));
    std::memcpy(buf + sizeof(int), &x.a, sizeof(int));
    std::memcpy(buf + 2 * sizeof(int), &x.s_next, sizeof(int));
    std::memcpy(buf + 3 * sizeof(int), &x.arm, sizeof(int));
    std::memcpy(buf + 4 * sizeof(int), &x.r, sizeof(double));
    h = fnv1a64(std::string_view(buf, sizeof buf), h);
  }
  return hex64(h);
}

EstimateReport estimate_mb(const Trajectory& traj, double gamma, bool plug_in) {
  const int K = traj.num_states;
  EmpiricalModel m = empirical_model(traj.steps, K, std::max(traj.num_actions, 1));
  EstimateReport rep;
  rep.estimator = "MB";
  rep.target = "V";
  rep.T = traj.steps.size();
  rep.inputs_hash = trajectory_hash(traj);
  coverage_flags(m, "trajectory", rep.flags);
  rep.point = value_function(m.P, m.r, gamma);
  if (plug_in && m.complete()) {
    ArmTerms t = empirical_arm(m, gamma);
    Vector mu = m.N / static_cast<double>(rep.T);
    Vector var = value_covariance(t, mu).diagonal();
    rep.plug_in_variance = var;
    rep.ci95 = intervals(rep.point, var, rep.T);
  }
  return rep;
}

EstimateReport estimate_td(const Trajectory& traj, double gamma) {
  const int K = traj.num_states;
  Matrix A = Matrix::Zero(K, K);
  Vector b = Vector::Zero(K);
  Vector N = Vector::Zero(K);
  for (const Transition& x : traj.steps) {
    if (x.s < 0 || x.s >= K || x.s_next < 0 || x.s_next >= K) {
      throw SplitContractError("transition index out of range");
    }
    A(x.s, x.s) += 1.0;
    A(x.s, x.s_next) -= gamma;
    b(x.s) += x.r;
    N(x.s) += 1.0;
  }
  EstimateReport rep;
  rep.estimator = "TD";
  rep.target = "V";
  rep.T = traj.steps.size();
  rep.inputs_hash = trajectory_hash(traj);
  const Matrix AtA = A.transpose() * A;
  const Vector Atb = A.transpose() * b;
  if ((N.array() > 0.0).all()) {
    Eigen::LDLT<Matrix> ldlt(AtA);
    Vector V = ldlt.solve(Atb);
    // one refinement step against the normal equations
    V += ldlt.solve(Atb - AtA * V);
    rep.point = V;
  } else {
    rep.flags.push_back("rank-deficient-normal-equations");
    rep.point = AtA.completeOrthogonalDecomposition().solve(Atb);
  }
  return rep;
}

std::optional<double> AteEstimate::plug_in_variance_at(int i, int j, int x) const {
  if (!plug_in) return std::nullopt;
  return pair_variance_at(*plug_in, design, i, j, x).total();
}

EstimateReport AteEstimate::report(int i, int j) const {
  EstimateReport rep;
  rep.estimator = estimator;
  rep.target = "ATE(" + std::to_string(i) + "," + std::to_string(j) + ")";
  rep.arm_i = i;
  rep.arm_j = j;
  rep.point = ate(i, j);
  rep.flags = flags;
  rep.T = T;
  rep.inputs_hash = inputs_hash;
  if (plug_in) {
    Vector var = pair_covariance(*plug_in, design, i, j).full().diagonal();
    rep.plug_in_variance = var;
    rep.ci95 = intervals(rep.point, var, T);
  }
  return rep;
}

AteEstimate estimate_ab(const Trajectory& traj, const Experiment& exp) {
  return split_estimate(traj, exp, SplitRule::AB, "AB", Design::AB);
}

AteEstimate estimate_is(const Trajectory& traj, const Experiment& exp) {
  return split_estimate(traj, exp, SplitRule::IS, "IS", Design::IS);
}

AteEstimate estimate_pi(const Trajectory& traj, const Experiment& exp) {
  require_arms(exp);
  const int K = exp.num_states();
  const int n = exp.num_arms();
  SplitDatasets d = split_pi(traj, exp);
  AteEstimate est;
  est.estimator = "PI";
  est.design = Design::PI;
  est.T = traj.steps.size();
  est.inputs_hash = trajectory_hash(traj);
  const InducedChain& c = exp.arm_chain(0);
  DesignTerms terms;
  terms.gamma = exp.gamma();
  terms.n = n;
  terms.crucial = exp.crucial_mask();
  terms.mu_pi = state_frequencies(traj);
  terms.mu = terms.mu_pi;
  terms.arms.push_back(arm_terms(c.P, c.r, c.sigma_sq, exp.gamma()));
  est.arm_values.push_back(terms.arms[0].V);
  bool ok = true;
  for (int i = 1; i < n; ++i) {
    EmpiricalModel m = empirical_model(d.per_arm[i], K, n);
    Matrix P = c.P;
    Vector r = c.r;
    Vector s2 = c.sigma_sq;
    for (int s : exp.spec().crucial_states()) {
      if (m.N(s) == 0) {
        est.flags.push_back("incomplete-coverage:arm" + std::to_string(i));
        ok = false;
      }
      P.row(s) = m.P.row(s);
      r(s) = m.r(s);
      s2(s) = m.r_var(s);
    }
    ArmTerms t = arm_terms(P, r, s2, exp.gamma());
    est.arm_values.push_back(t.V);
    terms.arms.push_back(std::move(t));
  }
  if (ok) est.plug_in = std::move(terms);
  return est;
}

Vector q_lookahead(const Vector& r_a, const Matrix& P_a, const Vector& V, double gamma) {
  return r_a + gamma * P_a * V;
}

namespace {

AteEstimate dq_family(const Trajectory& traj, const Experiment& exp, SplitRule rule,
                      const char* name, bool naive) {
  require_arms(exp);
  const int K = exp.num_states();
  const int n = exp.num_arms();
  const double g = exp.gamma();
  EmpiricalModel mix = empirical_model(traj.steps, K, n);
  SplitDatasets d = split(traj, exp, rule);
  AteEstimate est;
  est.estimator = name;
  est.T = traj.steps.size();
  est.inputs_hash = trajectory_hash(traj);
  coverage_flags(mix, "trajectory", est.flags);
  const Matrix M = resolvent(mix.P, g);
  const Vector V_mix = M * mix.r;
  for (int i = 0; i < n; ++i) {
    EmpiricalModel m = empirical_model(d.per_arm[i], K, n);
    coverage_flags(m, "arm" + std::to_string(i), est.flags);
    if (naive) {
      est.arm_values.push_back(M * m.r);
    } else if (n == 2) {
      est.arm_values.push_back(M * q_lookahead(m.r, m.P, V_mix, g));
    } else {
      const Vector Mr = M * m.r;
      est.arm_values.push_back(M * (m.r + g * (m.P - mix.P) * Mr));
    }
  }
  return est;
}

}  // namespace

AteEstimate estimate_naive(const Trajectory& traj, const Experiment& exp) {
  return dq_family(traj, exp, SplitRule::AB, "Naive", true);
}

AteEstimate estimate_dq(const Trajectory& traj, const Experiment& exp) {
  return dq_family(traj, exp, SplitRule::AB, "DQ", false);
}

AteEstimate estimate_dq_is(const Trajectory& traj, const Experiment& exp) {
  return dq_family(traj, exp, SplitRule::IS, "DQ-IS", false);
}

}  // namespace mdplab
