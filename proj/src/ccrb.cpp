#include "mdplab/ccrb.hpp"

#include <Eigen/Eigenvalues>

namespace mdplab {

namespace {

struct ArmGrad {
  Matrix M;
  Vector V;
  double gamma;
};

ArmGrad arm_grad(const Matrix& P, const Vector& r, double gamma) {
  ArmGrad g{resolvent(P, gamma), Vector(), gamma};
  g.V = g.M * r;
  return g;
}

// d V(x) / d P(s, k) = gamma M(x, s) V(k); d V(x) / d r(s) = M(x, s).
Matrix row_grad(const ArmGrad& g, int s, const std::vector<int>& support) {
  Matrix G(support.size(), g.M.rows());
  for (std::size_t k = 0; k < support.size(); ++k) {
    G.row(k) = g.gamma * g.V(support[k]) * g.M.col(s).transpose();
  }
  return G;
}

Matrix reward_grad(const ArmGrad& g, int s) { return g.M.col(s).transpose(); }

void push_row(std::vector<ParamBlock>& out, int arm, int s, const Vector& p, double weight,
              const std::vector<const ArmGrad*>& plus, const std::vector<const ArmGrad*>& minus) {
  ParamBlock b;
  b.kind = ParamBlock::Kind::Row;
  b.arm = arm;
  b.state = s;
  for (int k = 0; k < p.size(); ++k)
    if (p(k) > 0.0) b.support.push_back(k);
  if (b.support.size() < 2) return;
  b.value.resize(b.support.size());
  for (std::size_t k = 0; k < b.support.size(); ++k) b.value(k) = p(b.support[k]);
  b.weight = weight;
  b.grad = Matrix::Zero(b.support.size(), p.size());
  for (const ArmGrad* g : plus) b.grad += row_grad(*g, s, b.support);
  for (const ArmGrad* g : minus) b.grad -= row_grad(*g, s, b.support);
  out.push_back(std::move(b));
}

void push_reward(std::vector<ParamBlock>& out, int arm, int s, double sigma_sq, double weight,
                 int K, const std::vector<const ArmGrad*>& plus,
                 const std::vector<const ArmGrad*>& minus) {
  if (!(sigma_sq > 0.0)) return;
  ParamBlock b;
  b.kind = ParamBlock::Kind::Reward;
  b.arm = arm;
  b.state = s;
  b.value = Vector::Constant(1, sigma_sq);
  b.weight = weight;
  b.grad = Matrix::Zero(1, K);
  for (const ArmGrad* g : plus) b.grad += reward_grad(*g, s);
  for (const ArmGrad* g : minus) b.grad -= reward_grad(*g, s);
  out.push_back(std::move(b));
}

Vector mixed_mu(const Experiment& exp) {
  return stationary_distribution(exp.model(), exp.mixed_policy(exp.uniform_weights()));
}

int count_params(const std::vector<ParamBlock>& blocks) {
  int n = 0;
  for (const ParamBlock& b : blocks) n += static_cast<int>(b.value.size());
  return n;
}

}  // namespace

Matrix constraint_basis(int m) {
  Matrix U = Matrix::Zero(m, m - 1);
  U.row(0).setOnes();
  for (int k = 1; k < m; ++k) U(k, k - 1) = -1.0;
  return U;
}

Matrix ccrb_from_blocks(const std::vector<ParamBlock>& blocks, int K) {
  Matrix out = Matrix::Zero(K, K);
  for (const ParamBlock& b : blocks) {
    if (b.kind == ParamBlock::Kind::Reward) {
      out += (b.value(0) / b.weight) * b.grad.transpose() * b.grad;
      continue;
    }
    const int m = static_cast<int>(b.support.size());
    Matrix U = constraint_basis(m);
    // U^T F U with F = weight * Diag(1/p)
    Matrix UFU = U.transpose() * (b.weight * b.value.cwiseInverse()).asDiagonal() * U;
    Matrix C = U * UFU.ldlt().solve(U.transpose());
    out += b.grad.transpose() * C * b.grad;
  }
  return 0.5 * (out + out.transpose());
}

std::vector<ParamBlock> value_blocks(const MdpModel& model, const PolicyMatrix& policy) {
  InducedChain c = induce_chain(model, policy);
  Vector mu = stationary_distribution(c.P);
  ArmGrad g = arm_grad(c.P, c.r, model.gamma());
  const int K = model.num_states();
  std::vector<ParamBlock> out;
  for (int s = 0; s < K; ++s) {
    push_row(out, 0, s, c.P.row(s).transpose(), mu(s), {&g}, {});
    push_reward(out, 0, s, c.sigma_sq(s), mu(s), K, {&g}, {});
  }
  return out;
}

std::vector<ParamBlock> ate_blocks(const Experiment& exp, int i, int j) {
  std::vector<ParamBlock> out;
  if (i == j) return out;
  const int K = exp.num_states();
  const double n = exp.num_arms();
  Vector mu = mixed_mu(exp);
  const InducedChain& ci = exp.arm_chain(i);
  const InducedChain& cj = exp.arm_chain(j);
  ArmGrad gi = arm_grad(ci.P, ci.r, exp.gamma());
  ArmGrad gj = arm_grad(cj.P, cj.r, exp.gamma());
  for (int s = 0; s < K; ++s) {
    push_row(out, i, s, ci.P.row(s).transpose(), mu(s) / n, {&gi}, {});
    push_reward(out, i, s, ci.sigma_sq(s), mu(s) / n, K, {&gi}, {});
    push_row(out, j, s, cj.P.row(s).transpose(), mu(s) / n, {}, {&gj});
    push_reward(out, j, s, cj.sigma_sq(s), mu(s) / n, K, {}, {&gj});
  }
  return out;
}

std::vector<ParamBlock> shared_ate_blocks(const Experiment& exp, int i, int j) {
  std::vector<ParamBlock> out;
  if (i == j) return out;
  const int K = exp.num_states();
  const double n = exp.num_arms();
  Vector mu = mixed_mu(exp);
  const InducedChain& ci = exp.arm_chain(i);
  const InducedChain& cj = exp.arm_chain(j);
  const InducedChain& c0 = exp.arm_chain(0);
  ArmGrad gi = arm_grad(ci.P, ci.r, exp.gamma());
  ArmGrad gj = arm_grad(cj.P, cj.r, exp.gamma());
  for (int s = 0; s < K; ++s) {
    if (exp.crucial(s)) {
      push_row(out, i, s, ci.P.row(s).transpose(), mu(s) / n, {&gi}, {});
      push_reward(out, i, s, ci.sigma_sq(s), mu(s) / n, K, {&gi}, {});
      push_row(out, j, s, cj.P.row(s).transpose(), mu(s) / n, {}, {&gj});
      push_reward(out, j, s, cj.sigma_sq(s), mu(s) / n, K, {}, {&gj});
    } else {
      push_row(out, 0, s, c0.P.row(s).transpose(), mu(s), {&gi}, {&gj});
      push_reward(out, 0, s, c0.sigma_sq(s), mu(s), K, {&gi}, {&gj});
    }
  }
  return out;
}

double BoundReport::margin(const Matrix& sigma) const {
  Matrix D = sigma - matrix;
  D = 0.5 * (D + D.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(D, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

BoundReport ccrb_value(const MdpModel& model, const PolicyMatrix& policy) {
  std::vector<ParamBlock> b = value_blocks(model, policy);
  return {"CCRB-value", ccrb_from_blocks(b, model.num_states()), count_params(b)};
}

BoundReport ccrb_ate(const Experiment& exp, int i, int j) {
  std::vector<ParamBlock> b = ate_blocks(exp, i, j);
  return {"CCRB-ATE", ccrb_from_blocks(b, exp.num_states()), count_params(b)};
}

BoundReport ccrb_ate_shared(const Experiment& exp, int i, int j) {
  std::vector<ParamBlock> b = shared_ate_blocks(exp, i, j);
  return {"CCRB-ATE-shared", ccrb_from_blocks(b, exp.num_states()), count_params(b)};
}

}  // namespace mdplab
