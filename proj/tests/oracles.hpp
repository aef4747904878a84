#pragma once

// Dense reference computations used by the tests. They share no code with
// the library beyond the model containers.

#include "mdplab/treatments.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace oracle {

using mdplab::Matrix;
using mdplab::Vector;

// Stationary law by iterating the lazy chain (I + P) / 2.
inline Vector stationary(const Matrix& P) {
  const int K = static_cast<int>(P.rows());
  Matrix L = 0.5 * (Matrix::Identity(K, K) + P);
  Vector mu = Vector::Constant(K, 1.0 / K);
  for (int it = 0; it < 2000000; ++it) {
    Vector next = L.transpose() * mu;
    double d = (next - mu).lpNorm<1>();
    mu = next;
    if (d < 1e-16) break;
  }
  return mu / mu.sum();
}

inline Vector value(const Matrix& P, const Vector& r, double g) {
  const int K = static_cast<int>(P.rows());
  return (Matrix::Identity(K, K) - g * P).fullPivLu().solve(r);
}

// Tables of one arm, perturbed entry by entry.
struct Tables {
  Matrix P;
  Vector r;
  Vector s2;
};

// Flat parameter: entry (state, col) of a row, or a reward (col = -1), held
// in one or more arm tables at once.
struct Param {
  std::vector<int> arms;
  int state = 0;
  int col = -1;
  double fisher = 0.0;
  int group = -1;  // rows sharing a sum-to-one constraint
};

struct Problem {
  std::vector<Tables> tables;
  std::vector<Param> params;
  int groups = 0;
  double gamma = 0.0;
  std::function<Vector(const std::vector<Tables>&)> target;
};

inline void add_state(Problem& pb, const std::vector<int>& arms, int s, double weight) {
  const Tables& t = pb.tables[arms[0]];
  const int g = pb.groups++;
  for (int k = 0; k < t.P.cols(); ++k) {
    if (t.P(s, k) > 0.0) pb.params.push_back({arms, s, k, weight / t.P(s, k), g});
  }
  if (t.s2(s) > 0.0) pb.params.push_back({arms, s, -1, weight / t.s2(s), -1});
}

inline Matrix jacobian(const Problem& pb, double h) {
  const int D = static_cast<int>(pb.params.size());
  Vector base = pb.target(pb.tables);
  Matrix J(base.size(), D);
  for (int d = 0; d < D; ++d) {
    const Param& p = pb.params[d];
    std::vector<Tables> up = pb.tables, dn = pb.tables;
    for (int a : p.arms) {
      double& u = p.col < 0 ? up[a].r(p.state) : up[a].P(p.state, p.col);
      double& w = p.col < 0 ? dn[a].r(p.state) : dn[a].P(p.state, p.col);
      u += h;
      w -= h;
    }
    J.col(d) = (pb.target(up) - pb.target(dn)) / (2.0 * h);
  }
  return J;
}

// Bound J U (U^T F U)^{-1} U^T J^T with U an orthonormal null-space basis of
// the sum-to-one constraints, found by SVD.
inline Matrix bound(const Problem& pb, double h = 1e-6) {
  const int D = static_cast<int>(pb.params.size());
  Matrix C = Matrix::Zero(std::max(pb.groups, 1), D);
  for (int d = 0; d < D; ++d)
    if (pb.params[d].group >= 0) C(pb.params[d].group, d) = 1.0;
  Eigen::JacobiSVD<Matrix> svd(C, Eigen::ComputeFullV);
  int rank = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > 1e-10) ++rank;
  Matrix U = svd.matrixV().rightCols(D - rank);
  Vector f(D);
  for (int d = 0; d < D; ++d) f(d) = pb.params[d].fisher;
  Matrix inner = U.transpose() * f.asDiagonal() * U;
  Matrix J = jacobian(pb, h);
  Matrix B = J * U * inner.inverse() * U.transpose() * J.transpose();
  return 0.5 * (B + B.transpose());
}

inline Tables arm_tables(const mdplab::Experiment& e, int i) {
  const mdplab::InducedChain& c = e.arm_chain(i);
  return {c.P, c.r, c.sigma_sq};
}

inline Matrix mixed_chain(const mdplab::Experiment& e) {
  Matrix P = e.arm_chain(0).P;
  for (int s = 0; s < e.num_states(); ++s) {
    if (!e.crucial(s)) continue;
    Vector row = Vector::Zero(e.num_states());
    for (int i = 0; i < e.num_arms(); ++i) row += e.arm_chain(i).P.row(s).transpose();
    P.row(s) = row.transpose() / e.num_arms();
  }
  return P;
}

inline Problem value_problem(const Tables& t, double g) {
  Problem pb;
  pb.tables = {t};
  pb.gamma = g;
  Vector mu = stationary(t.P);
  for (int s = 0; s < t.P.rows(); ++s) add_state(pb, {0}, s, mu(s));
  pb.target = [g](const std::vector<Tables>& tb) { return value(tb[0].P, tb[0].r, g); };
  return pb;
}

// Arms i and j stored at positions 0 and 1.
inline Problem ate_problem(const mdplab::Experiment& e, int i, int j, bool shared) {
  Problem pb;
  pb.tables = {arm_tables(e, i), arm_tables(e, j)};
  pb.gamma = e.gamma();
  const double n = e.num_arms();
  Vector mu = stationary(mixed_chain(e));
  for (int s = 0; s < e.num_states(); ++s) {
    if (shared && !e.crucial(s)) {
      add_state(pb, {0, 1}, s, mu(s));
    } else {
      add_state(pb, {0}, s, mu(s) / n);
      add_state(pb, {1}, s, mu(s) / n);
    }
  }
  const double g = e.gamma();
  pb.target = [g](const std::vector<Tables>& tb) {
    return Vector(value(tb[0].P, tb[0].r, g) - value(tb[1].P, tb[1].r, g));
  };
  return pb;
}

inline double rel_frob(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace oracle
