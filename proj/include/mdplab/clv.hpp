#pragma once

#include "mdplab/treatments.hpp"

namespace mdplab {

// Five-state recency model of customer lifetime value.
enum class ClvVariant { SST, Local };
// Main: k-th coupon (k = 1..) costs 2 + 0.5(k-1). Appendix: 2 + 0.5k.
enum class ClvSchedule { Main, Appendix };

struct ClvOptions {
  ClvVariant variant = ClvVariant::SST;
  ClvSchedule schedule = ClvSchedule::Main;
  int num_arms = 2;  // including control
  double r_std = 0.0;
};

MdpModel clv_control_model(double r_std = 0.0);
TreatmentSpec clv_spec(const MdpModel& control, const ClvOptions& opt);
Experiment clv_experiment(const ClvOptions& opt);
// Treatment equal to control at the crucial state.
Experiment clv_null_experiment(double r_std = 0.0);

inline constexpr int kClvEvalState = 0;

}  // namespace mdplab
