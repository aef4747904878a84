#pragma once

#include "mdplab/mdp.hpp"
#include "mdplab/treatments.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdplab {

struct Transition {
  int s = 0;
  int a = 0;
  int s_next = 0;
  double r = 0.0;
  int arm = 0;  // arm drawn at this step; equals a for plain policies
};

struct Trajectory {
  std::vector<Transition> steps;
  std::uint64_t seed = 0;
  std::string policy;
  std::string model_hash;
  int num_states = 0;
  int num_actions = 0;
};

// Rollout of T transitions under a fixed policy. Without `start` the initial
// state is drawn from the stationary distribution of the induced chain.
Trajectory sample_trajectory(const MdpModel& model, const PolicyMatrix& policy,
                             std::size_t T, std::optional<int> start, std::uint64_t seed);

// Rollout of the experiment: an arm is drawn each step with `arm_weights`;
// the drawn arm's action is played at crucial states and control elsewhere.
Trajectory sample_experiment(const Experiment& exp, const std::vector<double>& arm_weights,
                             std::size_t T, std::optional<int> start, std::uint64_t seed);

enum class SplitRule { AB, IS, PI };
const char* split_name(SplitRule rule);

struct SplitDatasets {
  SplitRule rule = SplitRule::AB;
  std::vector<std::vector<Transition>> per_arm;
};

// Partition by drawn arm.
SplitDatasets split_ab(const Trajectory& traj, int num_arms);
// Non-crucial transitions go to every arm; crucial ones only to the drawn arm.
SplitDatasets split_is(const Trajectory& traj, const Experiment& exp);
// Crucial-state transitions per treatment arm; control arm stays empty.
SplitDatasets split_pi(const Trajectory& traj, const Experiment& exp);
SplitDatasets split(const Trajectory& traj, const Experiment& exp, SplitRule rule);

class SplitContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EmpiricalModel {
  int num_states = 0;
  int num_actions = 0;
  Vector N;            // visits per state
  Matrix N_trans;      // pooled N(s, s')
  Matrix P;            // pooled row estimates, uniform when unvisited
  Vector r;            // pooled mean reward, 0 when unvisited
  Vector r_var;        // pooled reward variance (1/N)
  Matrix N_sa;         // visits per (s, a)
  std::vector<Matrix> P_sa;
  Matrix r_sa;
  Matrix r_var_sa;
  std::vector<int> unvisited;
  bool complete() const { return unvisited.empty(); }
};

EmpiricalModel empirical_model(const std::vector<Transition>& data, int num_states,
                               int num_actions);

// Visit frequencies N(s)/T over the whole trajectory.
Vector state_frequencies(const Trajectory& traj);

}  // namespace mdplab
