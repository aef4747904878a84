#pragma once

#include "mdplab/simulate.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mdplab {

using SplitFn = std::function<SplitDatasets(const Trajectory&, const Experiment&)>;

// Deliberately broken sharing rule: crucial-state data copied to every arm.
SplitDatasets split_is_shares_crucial(const Trajectory& traj, const Experiment& exp);

struct AuditConfig {
  int instances = 500;
  int ccrb_instances = 200;
  int trajectories = 200;
  std::uint64_t seed = 1;
  bool parallel = true;
  SplitFn is_split = split_is;
};

struct AuditLine {
  std::string name;
  int checked = 0;
  int failed = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  bool pass() const { return failed == 0; }
};

struct AuditReport {
  std::vector<AuditLine> lines;
  bool pass() const;
  const AuditLine& line(const std::string& name) const;
};

AuditReport run_audit(const AuditConfig& cfg);

// Independent check of the sharing invariant for an IS split.
bool is_split_valid(const Trajectory& traj, const Experiment& exp, const SplitDatasets& d);

}  // namespace mdplab
