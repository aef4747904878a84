#include "mdplab/mdp.hpp"

#include <cmath>
#include <numeric>
#include <queue>
#include <limits>
#include <sstream>

namespace mdplab {

namespace {

constexpr double kProbTol = 1e-12;

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw ModelError(std::string(what) + " has non-finite entries");
}

std::string join_states(const std::vector<int>& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  return os.str();
}

std::vector<bool> reach(const Matrix& P, int from, bool forward) {
  const int K = static_cast<int>(P.rows());
  std::vector<bool> seen(K, false);
  std::queue<int> q;
  seen[from] = true;
  q.push(from);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v = 0; v < K; ++v) {
      double w = forward ? P(u, v) : P(v, u);
      if (w > 0.0 && !seen[v]) {
        seen[v] = true;
        q.push(v);
      }
    }
  }
  return seen;
}

int chain_period(const Matrix& P) {
  const int K = static_cast<int>(P.rows());
  std::vector<int> level(K, -1);
  std::queue<int> q;
  level[0] = 0;
  q.push(0);
  int g = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v = 0; v < K; ++v) {
      if (P(u, v) <= 0.0) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      } else {
        g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
      }
    }
  }
  return g;
}

}  // namespace

MdpModel::MdpModel(double gamma, std::vector<std::string> states,
                   std::vector<std::string> actions, std::vector<Matrix> P,
                   Matrix r_mean, Matrix r_std)
    : gamma_(gamma),
      states_(std::move(states)),
      actions_(std::move(actions)),
      P_(std::move(P)),
      r_mean_(std::move(r_mean)),
      r_std_(std::move(r_std)) {
  if (!(gamma_ > 0.0 && gamma_ < 1.0)) {
    throw ModelError("gamma must lie in (0,1), got " + std::to_string(gamma_));
  }
  const int K = num_states();
  const int A = num_actions();
  if (K == 0 || A == 0) throw ModelError("model needs at least one state and one action");
  if (static_cast<int>(P_.size()) != A) throw ModelError("P must have one matrix per action");
  if (r_mean_.rows() != K || r_mean_.cols() != A) throw ModelError("r_mean must be K x A");
  if (r_std_.rows() != K || r_std_.cols() != A) throw ModelError("r_std must be K x A");
  check_finite(r_mean_, "r_mean");
  check_finite(r_std_, "r_std");
  if ((r_std_.array() < 0.0).any()) throw ModelError("r_std must be nonnegative");
  for (int a = 0; a < A; ++a) {
    Matrix& M = P_[a];
    if (M.rows() != K || M.cols() != K) throw ModelError("each P[a] must be K x K");
    check_finite(M, "P");
    for (int s = 0; s < K; ++s) {
      if (M.row(s).minCoeff() < -kProbTol) {
        throw ModelError("negative transition probability at state " + states_[s] +
                         ", action " + actions_[a]);
      }
      double sum = M.row(s).sum();
      if (std::abs(sum - 1.0) > kProbTol) {
        std::ostringstream os;
        os.precision(17);
        os << "transition row (" << states_[s] << ", " << actions_[a] << ") sums to " << sum;
        throw ModelError(os.str());
      }
      M.row(s) = M.row(s).cwiseMax(0.0);
      const double clamped = M.row(s).sum();
      if (std::abs(clamped - 1.0) > 8 * std::numeric_limits<double>::epsilon()) M.row(s) /= clamped;
    }
  }
}

int MdpModel::state_index(const std::string& name) const {
  for (int i = 0; i < num_states(); ++i)
    if (states_[i] == name) return i;
  throw ModelError("unknown state '" + name + "'");
}

int MdpModel::action_index(const std::string& name) const {
  for (int i = 0; i < num_actions(); ++i)
    if (actions_[i] == name) return i;
  return -1;
}

PolicyMatrix::PolicyMatrix(Matrix pi) : pi_(std::move(pi)) {
  check_finite(pi_, "policy");
  for (int s = 0; s < pi_.rows(); ++s) {
    if (pi_.row(s).minCoeff() < -kProbTol || std::abs(pi_.row(s).sum() - 1.0) > kProbTol) {
      throw ModelError("policy row " + std::to_string(s) + " is not a distribution");
    }
  }
}

PolicyMatrix PolicyMatrix::deterministic(int num_actions,
                                         const std::vector<int>& action_per_state) {
  Matrix pi = Matrix::Zero(static_cast<int>(action_per_state.size()), num_actions);
  for (std::size_t s = 0; s < action_per_state.size(); ++s) {
    int a = action_per_state[s];
    if (a < 0 || a >= num_actions) throw ModelError("action index out of range");
    pi(static_cast<int>(s), a) = 1.0;
  }
  return PolicyMatrix(std::move(pi));
}

InducedChain induce_chain(const MdpModel& model, const PolicyMatrix& policy) {
  const int K = model.num_states();
  const int A = model.num_actions();
  if (policy.num_states() != K || policy.num_actions() != A) {
    throw ModelError("policy shape does not match model");
  }
  InducedChain c{Matrix::Zero(K, K), Vector::Zero(K), Vector::Zero(K)};
  for (int a = 0; a < A; ++a) {
    const Vector w = policy.matrix().col(a);
    c.P += w.asDiagonal() * model.transitions(a);
    c.r += w.cwiseProduct(model.r_mean().col(a));
    c.sigma_sq += w.cwiseProduct(model.r_std().col(a).cwiseAbs2());
  }
  return c;
}

Matrix resolvent(const Matrix& P, double gamma) {
  const int K = static_cast<int>(P.rows());
  Matrix A = Matrix::Identity(K, K) - gamma * P;
  return A.partialPivLu().inverse();
}

Vector value_function(const Matrix& P, const Vector& r, double gamma) {
  const int K = static_cast<int>(P.rows());
  Matrix A = Matrix::Identity(K, K) - gamma * P;
  Vector V = A.partialPivLu().solve(r);
  double resid = (A * V - r).lpNorm<Eigen::Infinity>();
  if (!(resid < 1e-9 * std::max(1.0, r.lpNorm<Eigen::Infinity>()))) {
    throw NumericalError("value solve residual " + std::to_string(resid));
  }
  return V;
}

Vector value_function(const MdpModel& model, const PolicyMatrix& policy) {
  InducedChain c = induce_chain(model, policy);
  return value_function(c.P, c.r, model.gamma());
}

Vector visitation(const Matrix& P, double gamma, int start) {
  const int K = static_cast<int>(P.rows());
  if (start < 0 || start >= K) throw ModelError("start state out of range");
  Matrix A = Matrix::Identity(K, K) - gamma * P;
  Vector e = Vector::Unit(K, start);
  return A.transpose().partialPivLu().solve(e);
}

Vector visitation(const MdpModel& model, const PolicyMatrix& policy, int start) {
  return visitation(induce_chain(model, policy).P, model.gamma(), start);
}

ErgodicityCertificate check_ergodicity(const Matrix& P, double tv_tol, int max_doublings) {
  ErgodicityCertificate cert;
  const int K = static_cast<int>(P.rows());
  std::vector<bool> fwd = reach(P, 0, true);
  std::vector<bool> bwd = reach(P, 0, false);
  for (int s = 0; s < K; ++s)
    if (!(fwd[s] && bwd[s])) cert.unreached.push_back(s);
  cert.irreducible = cert.unreached.empty();
  if (!cert.irreducible) return cert;
  cert.period = chain_period(P);
  cert.aperiodic = cert.period == 1;
  if (!cert.aperiodic) return cert;

  Vector mu = stationary_distribution(P);
  Matrix Pk = P;
  std::int64_t k = 1;
  for (int d = 0; d <= max_doublings; ++d) {
    double tv = 0.0;
    for (int s = 0; s < K; ++s) {
      tv = std::max(tv, 0.5 * (Pk.row(s).transpose() - mu).lpNorm<1>());
    }
    cert.tv_ladder.emplace_back(k, tv);
    if (tv < tv_tol) {
      cert.mixing_ok = true;
      break;
    }
    Pk = Pk * Pk;
    k *= 2;
  }
  return cert;
}

Vector stationary_distribution(const Matrix& P) {
  const int K = static_cast<int>(P.rows());
  std::vector<bool> fwd = reach(P, 0, true);
  std::vector<bool> bwd = reach(P, 0, false);
  std::vector<int> bad;
  for (int s = 0; s < K; ++s)
    if (!(fwd[s] && bwd[s])) bad.push_back(s);
  if (!bad.empty()) {
    throw NonErgodicError("chain is reducible; states not communicating with 0: " +
                              join_states(bad),
                          bad);
  }
  int period = chain_period(P);
  if (period != 1) {
    throw NonErgodicError("chain is periodic with period " + std::to_string(period), {});
  }
  Matrix A = (Matrix::Identity(K, K) - P).transpose();
  A.row(K - 1).setOnes();
  Vector b = Vector::Unit(K, K - 1);
  Vector mu = A.partialPivLu().solve(b);
  double resid = (P.transpose() * mu - mu).lpNorm<Eigen::Infinity>();
  if (!(resid < 1e-10) || mu.minCoeff() <= 0.0) {
    throw NumericalError("stationary solve failed, residual " + std::to_string(resid));
  }
  return mu / mu.sum();
}

Vector stationary_distribution(const MdpModel& model, const PolicyMatrix& policy) {
  return stationary_distribution(induce_chain(model, policy).P);
}

Matrix q_values(const MdpModel& model, const Vector& base_value) {
  const int K = model.num_states();
  const int A = model.num_actions();
  Matrix Q(K, A);
  for (int a = 0; a < A; ++a) {
    Q.col(a) = model.r_mean().col(a) + model.gamma() * model.transitions(a) * base_value;
  }
  return Q;
}

Matrix q_values(const MdpModel& model, const PolicyMatrix& base_policy) {
  return q_values(model, value_function(model, base_policy));
}

Matrix group_inverse(const Matrix& P) {
  const int K = static_cast<int>(P.rows());
  Vector mu = stationary_distribution(P);
  Matrix ones_mu = Vector::Ones(K) * mu.transpose();
  Matrix Z = (Matrix::Identity(K, K) - P + ones_mu).partialPivLu().inverse();
  return Z - ones_mu;
}

Matrix multinomial_cov(const Vector& p) {
  Matrix S = -p * p.transpose();
  S.diagonal() += p;
  return S;
}

}  // namespace mdplab
