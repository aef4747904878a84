#include "mdplab/simulate.hpp"

#include "mdplab/rng.hpp"

#include <sstream>

namespace mdplab {

namespace {

int draw(const double* cdf, int n, double u) {
  for (int i = 0; i < n - 1; ++i)
    if (u < cdf[i]) return i;
  return n - 1;
}

// Cumulative rows, laid out [s][a][s'].
std::vector<double> cumulative_rows(const MdpModel& model) {
  const int K = model.num_states();
  const int A = model.num_actions();
  std::vector<double> cdf(static_cast<std::size_t>(K) * A * K);
  for (int s = 0; s < K; ++s) {
    for (int a = 0; a < A; ++a) {
      double acc = 0.0;
      double* row = &cdf[(static_cast<std::size_t>(s) * A + a) * K];
      for (int k = 0; k < K; ++k) {
        acc += model.p(s, a, k);
        row[k] = acc;
      }
    }
  }
  return cdf;
}

std::vector<double> cumulative(const Vector& w) {
  std::vector<double> c(w.size());
  double acc = 0.0;
  for (int i = 0; i < w.size(); ++i) {
    acc += w(i);
    c[i] = acc;
  }
  return c;
}

int initial_state(const Matrix& P, std::optional<int> start, Rng& rng) {
  if (start) {
    if (*start < 0 || *start >= P.rows()) throw ModelError("start state out of range");
    return *start;
  }
  std::vector<double> c = cumulative(stationary_distribution(P));
  return draw(c.data(), static_cast<int>(c.size()), rng.uniform());
}

std::string describe(const std::vector<double>& w) {
  std::ostringstream os;
  os.precision(6);
  os << "arm_weights[";
  for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
  os << "]";
  return os.str();
}

}  // namespace

Trajectory sample_trajectory(const MdpModel& model, const PolicyMatrix& policy, std::size_t T,
                             std::optional<int> start, std::uint64_t seed) {
  const int K = model.num_states();
  const int A = model.num_actions();
  InducedChain chain = induce_chain(model, policy);
  Rng rng(seed);
  std::vector<double> cdf = cumulative_rows(model);
  std::vector<std::vector<double>> pcdf(K);
  for (int s = 0; s < K; ++s) pcdf[s] = cumulative(policy.matrix().row(s).transpose());

  Trajectory traj;
  traj.seed = seed;
  traj.policy = "policy";
  traj.num_states = K;
  traj.num_actions = A;
  traj.steps.resize(T);
  int s = initial_state(chain.P, start, rng);
  for (std::size_t t = 0; t < T; ++t) {
    int a = draw(pcdf[s].data(), A, rng.uniform());
    int sn = draw(&cdf[(static_cast<std::size_t>(s) * A + a) * K], K, rng.uniform());
    double sd = model.r_std()(s, a);
    double r = model.r_mean()(s, a) + (sd > 0.0 ? sd * rng.normal() : 0.0);
    traj.steps[t] = {s, a, sn, r, a};
    s = sn;
  }
  return traj;
}

Trajectory sample_experiment(const Experiment& exp, const std::vector<double>& arm_weights,
                             std::size_t T, std::optional<int> start, std::uint64_t seed) {
  const MdpModel& model = exp.model();
  const int K = model.num_states();
  const int n = exp.num_arms();
  if (static_cast<int>(arm_weights.size()) != n) throw ModelError("one weight per arm required");
  Vector w = Eigen::Map<const Vector>(arm_weights.data(), n);
  if (w.minCoeff() < 0.0 || std::abs(w.sum() - 1.0) > 1e-12) {
    throw ModelError("arm weights must form a distribution");
  }
  PolicyMatrix pi = exp.mixed_policy(arm_weights);
  Rng rng(seed);
  std::vector<double> cdf = cumulative_rows(model);
  std::vector<double> acdf = cumulative(w);

  Trajectory traj;
  traj.seed = seed;
  traj.policy = describe(arm_weights);
  traj.num_states = K;
  traj.num_actions = n;
  traj.steps.resize(T);
  int s = initial_state(induce_chain(model, pi).P, start, rng);
  for (std::size_t t = 0; t < T; ++t) {
    int arm = draw(acdf.data(), n, rng.uniform());
    int a = exp.crucial(s) ? arm : 0;
    int sn = draw(&cdf[(static_cast<std::size_t>(s) * n + a) * K], K, rng.uniform());
    double sd = model.r_std()(s, a);
    double r = model.r_mean()(s, a) + (sd > 0.0 ? sd * rng.normal() : 0.0);
    traj.steps[t] = {s, a, sn, r, arm};
    s = sn;
  }
  return traj;
}

const char* split_name(SplitRule rule) {
  switch (rule) {
    case SplitRule::AB: return "AB";
    case SplitRule::IS: return "IS";
    case SplitRule::PI: return "PI";
  }
  return "?";
}

SplitDatasets split_ab(const Trajectory& traj, int num_arms) {
  SplitDatasets d{SplitRule::AB, std::vector<std::vector<Transition>>(num_arms)};
  for (const Transition& x : traj.steps) {
    if (x.arm < 0 || x.arm >= num_arms) throw SplitContractError("arm index out of range");
    d.per_arm[x.arm].push_back(x);
  }
  return d;
}

SplitDatasets split_is(const Trajectory& traj, const Experiment& exp) {
  const int n = exp.num_arms();
  SplitDatasets d{SplitRule::IS, std::vector<std::vector<Transition>>(n)};
  for (auto& v : d.per_arm) v.reserve(traj.steps.size());
  for (const Transition& x : traj.steps) {
    if (x.arm < 0 || x.arm >= n) throw SplitContractError("arm index out of range");
    if (exp.crucial(x.s)) {
      d.per_arm[x.arm].push_back(x);
    } else {
      for (int i = 0; i < n; ++i) d.per_arm[i].push_back(x);
    }
  }
  return d;
}

SplitDatasets split_pi(const Trajectory& traj, const Experiment& exp) {
  const int n = exp.num_arms();
  SplitDatasets d{SplitRule::PI, std::vector<std::vector<Transition>>(n)};
  for (const Transition& x : traj.steps) {
    if (!exp.crucial(x.s)) continue;
    if (x.arm == 0) {
      throw SplitContractError("control arm drawn at a crucial state in a PI trajectory");
    }
    if (x.arm < 0 || x.arm >= n) throw SplitContractError("arm index out of range");
    d.per_arm[x.arm].push_back(x);
  }
  return d;
}

SplitDatasets split(const Trajectory& traj, const Experiment& exp, SplitRule rule) {
  switch (rule) {
    case SplitRule::AB: return split_ab(traj, exp.num_arms());
    case SplitRule::IS: return split_is(traj, exp);
    case SplitRule::PI: return split_pi(traj, exp);
  }
  throw SplitContractError("unknown split rule");
}

EmpiricalModel empirical_model(const std::vector<Transition>& data, int K, int A) {
  EmpiricalModel m;
  m.num_states = K;
  m.num_actions = A;
  m.N = Vector::Zero(K);
  m.N_trans = Matrix::Zero(K, K);
  m.N_sa = Matrix::Zero(K, A);
  m.P_sa.assign(A, Matrix::Zero(K, K));
  Vector rsum = Vector::Zero(K), rsq = Vector::Zero(K);
  Matrix rsum_sa = Matrix::Zero(K, A), rsq_sa = Matrix::Zero(K, A);
  for (const Transition& x : data) {
    if (x.s < 0 || x.s >= K || x.s_next < 0 || x.s_next >= K || x.a < 0 || x.a >= A) {
      throw SplitContractError("transition index out of range");
    }
    m.N(x.s) += 1.0;
    m.N_trans(x.s, x.s_next) += 1.0;
    m.N_sa(x.s, x.a) += 1.0;
    m.P_sa[x.a](x.s, x.s_next) += 1.0;
    rsum(x.s) += x.r;
    rsq(x.s) += x.r * x.r;
    rsum_sa(x.s, x.a) += x.r;
    rsq_sa(x.s, x.a) += x.r * x.r;
  }
  m.P = Matrix::Constant(K, K, 1.0 / K);
  m.r = Vector::Zero(K);
  m.r_var = Vector::Zero(K);
  for (int s = 0; s < K; ++s) {
    if (m.N(s) > 0) {
      m.P.row(s) = m.N_trans.row(s) / m.N(s);
      m.r(s) = rsum(s) / m.N(s);
      m.r_var(s) = std::max(0.0, rsq(s) / m.N(s) - m.r(s) * m.r(s));
    } else {
      m.unvisited.push_back(s);
    }
  }
  m.r_sa = Matrix::Zero(K, A);
  m.r_var_sa = Matrix::Zero(K, A);
  for (int a = 0; a < A; ++a) {
    for (int s = 0; s < K; ++s) {
      double n_sa = m.N_sa(s, a);
      if (n_sa > 0) {
        m.P_sa[a].row(s) /= n_sa;
        m.r_sa(s, a) = rsum_sa(s, a) / n_sa;
        m.r_var_sa(s, a) = std::max(0.0, rsq_sa(s, a) / n_sa - m.r_sa(s, a) * m.r_sa(s, a));
      } else {
        m.P_sa[a].row(s).setConstant(1.0 / K);
      }
    }
  }
  return m;
}

Vector state_frequencies(const Trajectory& traj) {
  Vector f = Vector::Zero(traj.num_states);
  for (const Transition& x : traj.steps) f(x.s) += 1.0;
  if (!traj.steps.empty()) f /= static_cast<double>(traj.steps.size());
  return f;
}

}  // namespace mdplab
