#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mdplab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonErgodicError : public ModelError {
 public:
  NonErgodicError(const std::string& what, std::vector<int> states)
      : ModelError(what), states_(std::move(states)) {}
  const std::vector<int>& states() const { return states_; }

 private:
  std::vector<int> states_;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tabular discounted MDP. Transitions are stored per action as K x K
// row-stochastic matrices; rewards as K x A tables of mean and std.
class MdpModel {
 public:
  MdpModel() = default;
  MdpModel(double gamma, std::vector<std::string> states,
           std::vector<std::string> actions, std::vector<Matrix> P,
           Matrix r_mean, Matrix r_std);

  int num_states() const { return static_cast<int>(states_.size()); }
  int num_actions() const { return static_cast<int>(actions_.size()); }
  double gamma() const { return gamma_; }

  const Matrix& transitions(int a) const { return P_.at(a); }
  Vector row(int s, int a) const { return P_.at(a).row(s).transpose(); }
  double p(int s, int a, int s_next) const { return P_.at(a)(s, s_next); }
  const Matrix& r_mean() const { return r_mean_; }
  const Matrix& r_std() const { return r_std_; }

  const std::vector<std::string>& state_names() const { return states_; }
  const std::vector<std::string>& action_names() const { return actions_; }
  int state_index(const std::string& name) const;
  int action_index(const std::string& name) const;  // -1 if absent

 private:
  double gamma_ = 0.0;
  std::vector<std::string> states_;
  std::vector<std::string> actions_;
  std::vector<Matrix> P_;
  Matrix r_mean_;
  Matrix r_std_;
};

// pi(s, a); rows sum to one.
class PolicyMatrix {
 public:
  PolicyMatrix() = default;
  explicit PolicyMatrix(Matrix pi);
  static PolicyMatrix deterministic(int num_actions,
                                    const std::vector<int>& action_per_state);

  const Matrix& matrix() const { return pi_; }
  double operator()(int s, int a) const { return pi_(s, a); }
  int num_states() const { return static_cast<int>(pi_.rows()); }
  int num_actions() const { return static_cast<int>(pi_.cols()); }

 private:
  Matrix pi_;
};

struct InducedChain {
  Matrix P;          // P_pi(s, s')
  Vector r;          // r_pi(s)
  Vector sigma_sq;   // sum_a pi(a|s) sigma(s,a)^2
};

InducedChain induce_chain(const MdpModel& model, const PolicyMatrix& policy);

// (I - gamma P)^{-1}
Matrix resolvent(const Matrix& P, double gamma);

Vector value_function(const Matrix& P, const Vector& r, double gamma);
Vector value_function(const MdpModel& model, const PolicyMatrix& policy);

// Discounted visitation measure from `start`: e_start^T (I - gamma P)^{-1}.
Vector visitation(const Matrix& P, double gamma, int start);
Vector visitation(const MdpModel& model, const PolicyMatrix& policy, int start);

struct ErgodicityCertificate {
  bool irreducible = false;
  bool aperiodic = false;
  int period = 0;
  std::vector<int> unreached;
  // (k, max_s TV(P^k(s, .), mu)) for k = 1, 2, 4, ...
  std::vector<std::pair<std::int64_t, double>> tv_ladder;
  bool mixing_ok = false;
  bool ergodic() const { return irreducible && aperiodic && mixing_ok; }
};

ErgodicityCertificate check_ergodicity(const Matrix& P, double tv_tol = 1e-10,
                                       int max_doublings = 40);

// Unique stationary distribution; throws NonErgodicError otherwise.
Vector stationary_distribution(const Matrix& P);
Vector stationary_distribution(const MdpModel& model,
                               const PolicyMatrix& policy);

// Q(s, a) = r(s, a) + gamma sum_s' P(s'|s,a) V^base(s').
Matrix q_values(const MdpModel& model, const PolicyMatrix& base_policy);
Matrix q_values(const MdpModel& model, const Vector& base_value);

// Group inverse of I - P for an ergodic P.
Matrix group_inverse(const Matrix& P);

// Sigma_p = Diag(p) - p p^T.
Matrix multinomial_cov(const Vector& p);

}  // namespace mdplab
