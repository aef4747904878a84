#pragma once

#include "mdplab/mdp.hpp"
#include "mdplab/treatments.hpp"

#include <string>
#include <vector>

namespace mdplab {

// One constrained parameter group: a transition row restricted to its
// support, or a scalar mean reward.
struct ParamBlock {
  enum class Kind { Row, Reward };
  Kind kind = Kind::Row;
  int arm = 0;    // arm whose tables hold the parameter (0 for shared)
  int state = 0;
  std::vector<int> support;  // rows only
  Vector value;              // probabilities on the support, or sigma^2 for rewards
  double weight = 0.0;       // expected observations per step
  Matrix grad;               // d target / d theta, one row per parameter
};

// Explicit basis of the constraint null space: first row ones, then -I.
Matrix constraint_basis(int m);

// Sum over blocks of grad^T U (U^T F U)^{-1} U^T grad.
Matrix ccrb_from_blocks(const std::vector<ParamBlock>& blocks, int num_states);

std::vector<ParamBlock> value_blocks(const MdpModel& model, const PolicyMatrix& policy);
// Arms estimated from disjoint data.
std::vector<ParamBlock> ate_blocks(const Experiment& exp, int i, int j);
// Non-crucial rows and rewards shared by all arms.
std::vector<ParamBlock> shared_ate_blocks(const Experiment& exp, int i, int j);

struct BoundReport {
  std::string name;
  Matrix matrix;
  int num_parameters = 0;
  // Smallest eigenvalue of sigma - matrix.
  double margin(const Matrix& sigma) const;
};

BoundReport ccrb_value(const MdpModel& model, const PolicyMatrix& policy);
BoundReport ccrb_ate(const Experiment& exp, int i, int j);
BoundReport ccrb_ate_shared(const Experiment& exp, int i, int j);

}  // namespace mdplab
