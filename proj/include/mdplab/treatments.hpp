#pragma once

#include "mdplab/mdp.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mdplab {

struct StateOverride {
  Vector row;
  double r_mean = 0.0;
  double r_std = 0.0;
};

struct ArmSpec {
  std::string label;
  // Keyed by state index. Only crucial states may be overridden.
  std::map<int, StateOverride> overrides;
};

// Arm 0 is the control. Treatment arms differ from control only at the
// crucial states.
class TreatmentSpec {
 public:
  TreatmentSpec() = default;
  TreatmentSpec(std::vector<int> crucial_states, std::vector<ArmSpec> arms);

  int num_arms() const { return static_cast<int>(arms_.size()); }
  const std::vector<int>& crucial_states() const { return crucial_; }
  const ArmSpec& arm(int i) const { return arms_.at(i); }
  const std::vector<ArmSpec>& arms() const { return arms_; }
  bool is_crucial(int s) const;
  bool single_state() const { return crucial_.size() == 1; }

 private:
  std::vector<int> crucial_;
  std::vector<ArmSpec> arms_;
};

// The experiment couples a base model with a spec. Its model has one action
// per arm; at non-crucial states every action carries the control row, and
// arm policies play the control action there.
class Experiment {
 public:
  Experiment() = default;
  Experiment(const MdpModel& base, TreatmentSpec spec);

  const MdpModel& model() const { return model_; }
  const MdpModel& base() const { return base_; }
  const TreatmentSpec& spec() const { return spec_; }
  int num_arms() const { return spec_.num_arms(); }
  int num_states() const { return model_.num_states(); }
  double gamma() const { return model_.gamma(); }
  bool crucial(int s) const { return mask_[s]; }
  const std::vector<bool>& crucial_mask() const { return mask_; }

  const PolicyMatrix& arm_policy(int i) const { return policies_.at(i); }
  const InducedChain& arm_chain(int i) const { return chains_.at(i); }
  const Vector& arm_value(int i) const { return values_.at(i); }

  // Arm drawn with `weights` at crucial states; control elsewhere.
  PolicyMatrix mixed_policy(const std::vector<double>& weights) const;
  std::vector<double> uniform_weights() const;
  // Uniform over the treatment arms, zero on control.
  std::vector<double> treatment_weights() const;

 private:
  MdpModel base_;
  MdpModel model_;
  TreatmentSpec spec_;
  std::vector<bool> mask_;
  std::vector<PolicyMatrix> policies_;
  std::vector<InducedChain> chains_;
  std::vector<Vector> values_;
};

struct ArmRealization {
  MdpModel model;
  PolicyMatrix policy;
  InducedChain chain;
};

ArmRealization realize_arm(const Experiment& exp, int arm);
PolicyMatrix mixed_policy(const Experiment& exp, const std::vector<double>& weights);

// V^i - V^j over all states.
Vector true_ate(const Experiment& exp, int i, int j);

// Arm with the largest true ATE against control at `state`.
int best_arm(const Experiment& exp, int state);

}  // namespace mdplab
