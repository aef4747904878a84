#include "mdplab/treatments.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mdplab {

TreatmentSpec::TreatmentSpec(std::vector<int> crucial_states, std::vector<ArmSpec> arms)
    : crucial_(std::move(crucial_states)), arms_(std::move(arms)) {
  if (crucial_.empty()) throw ModelError("treatment spec needs at least one crucial state");
  std::sort(crucial_.begin(), crucial_.end());
  if (std::adjacent_find(crucial_.begin(), crucial_.end()) != crucial_.end()) {
    throw ModelError("duplicate crucial state");
  }
  if (arms_.empty()) throw ModelError("treatment spec needs a control arm");
  if (!arms_[0].overrides.empty()) throw ModelError("control arm must not carry overrides");
  std::set<std::string> labels;
  for (const ArmSpec& a : arms_) {
    if (!labels.insert(a.label).second) throw ModelError("duplicate arm label '" + a.label + "'");
    for (const auto& [s, o] : a.overrides) {
      if (!is_crucial(s)) {
        throw ModelError("arm '" + a.label + "' overrides non-crucial state " + std::to_string(s));
      }
      if (o.r_std < 0.0 || !std::isfinite(o.r_std) || !std::isfinite(o.r_mean)) {
        throw ModelError("arm '" + a.label + "' has an invalid reward override");
      }
    }
  }
}

bool TreatmentSpec::is_crucial(int s) const {
  return std::binary_search(crucial_.begin(), crucial_.end(), s);
}

Experiment::Experiment(const MdpModel& base, TreatmentSpec spec)
    : base_(base), spec_(std::move(spec)) {
  const int K = base.num_states();
  const int n = spec_.num_arms();
  mask_.assign(K, false);
  for (int s : spec_.crucial_states()) {
    if (s < 0 || s >= K) throw ModelError("crucial state out of range");
    mask_[s] = true;
  }
  int control_action = base.action_index(spec_.arm(0).label);
  if (control_action < 0) control_action = 0;

  std::vector<std::string> labels;
  std::vector<Matrix> P(n, base.transitions(control_action));
  Matrix r_mean(K, n), r_std(K, n);
  for (int i = 0; i < n; ++i) {
    const ArmSpec& arm = spec_.arm(i);
    labels.push_back(arm.label);
    r_mean.col(i) = base.r_mean().col(control_action);
    r_std.col(i) = base.r_std().col(control_action);
    int model_action = i == 0 ? control_action : base.action_index(arm.label);
    for (int s : spec_.crucial_states()) {
      auto it = arm.overrides.find(s);
      if (it != arm.overrides.end()) {
        if (it->second.row.size() != K) {
          throw ModelError("override row for arm '" + arm.label + "' has wrong length");
        }
        P[i].row(s) = it->second.row.transpose();
        r_mean(s, i) = it->second.r_mean;
        r_std(s, i) = it->second.r_std;
      } else if (model_action >= 0) {
        P[i].row(s) = base.transitions(model_action).row(s);
        r_mean(s, i) = base.r_mean()(s, model_action);
        r_std(s, i) = base.r_std()(s, model_action);
      } else {
        throw ModelError("arm '" + arm.label + "' has no dynamics at crucial state " +
                         base.state_names()[s]);
      }
    }
  }
  model_ = MdpModel(base.gamma(), base.state_names(), labels, std::move(P),
                    std::move(r_mean), std::move(r_std));

  for (int i = 0; i < n; ++i) {
    std::vector<int> acts(K, 0);
    for (int s : spec_.crucial_states()) acts[s] = i;
    policies_.push_back(PolicyMatrix::deterministic(n, acts));
    chains_.push_back(induce_chain(model_, policies_.back()));
    values_.push_back(value_function(chains_.back().P, chains_.back().r, model_.gamma()));
  }
}

PolicyMatrix Experiment::mixed_policy(const std::vector<double>& weights) const {
  const int K = num_states();
  const int n = num_arms();
  if (static_cast<int>(weights.size()) != n) throw ModelError("one weight per arm required");
  Matrix pi = Matrix::Zero(K, n);
  for (int s = 0; s < K; ++s) {
    if (mask_[s]) {
      for (int i = 0; i < n; ++i) pi(s, i) = weights[i];
    } else {
      pi(s, 0) = 1.0;
    }
  }
  return PolicyMatrix(std::move(pi));
}

std::vector<double> Experiment::uniform_weights() const {
  return std::vector<double>(num_arms(), 1.0 / num_arms());
}

std::vector<double> Experiment::treatment_weights() const {
  const int n = num_arms();
  if (n < 2) throw ModelError("no treatment arms");
  std::vector<double> w(n, 1.0 / (n - 1));
  w[0] = 0.0;
  return w;
}

ArmRealization realize_arm(const Experiment& exp, int arm) {
  return {exp.model(), exp.arm_policy(arm), exp.arm_chain(arm)};
}

PolicyMatrix mixed_policy(const Experiment& exp, const std::vector<double>& weights) {
  return exp.mixed_policy(weights);
}

Vector true_ate(const Experiment& exp, int i, int j) {
  return exp.arm_value(i) - exp.arm_value(j);
}

int best_arm(const Experiment& exp, int state) {
  int best = 1;
  for (int i = 2; i < exp.num_arms(); ++i) {
    if (exp.arm_value(i)(state) > exp.arm_value(best)(state)) best = i;
  }
  return best;
}

}  // namespace mdplab
