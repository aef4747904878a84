#include "mdplab/clv.hpp"

namespace mdplab {

MdpModel clv_control_model(double r_std) {
  Matrix P(5, 5);
  P << 0.6, 0.4, 0.0, 0.0, 0.0,
       0.5, 0.0, 0.5, 0.0, 0.0,
       0.4, 0.0, 0.0, 0.6, 0.0,
       0.3, 0.0, 0.0, 0.0, 0.7,
       0.1, 0.0, 0.0, 0.0, 0.9;
  Matrix r = Matrix::Zero(5, 1);
  r(0, 0) = 30.0;
  Matrix sd = Matrix::Constant(5, 1, r_std);
  return MdpModel(1.0 / 1.2, {"s1", "s2", "s3", "s4", "s5"}, {"c"}, {P}, r, sd);
}

TreatmentSpec clv_spec(const MdpModel& control, const ClvOptions& opt) {
  if (opt.num_arms < 1 || opt.num_arms > 6) throw ModelError("CLV supports 1 to 6 arms");
  const bool local = opt.variant == ClvVariant::Local;
  std::vector<int> crucial = local ? std::vector<int>{2, 3, 4} : std::vector<int>{4};
  std::vector<ArmSpec> arms{{"c", {}}};
  for (int k = 1; k < opt.num_arms; ++k) {
    const double step = opt.schedule == ClvSchedule::Main ? k - 1 : k;
    const double cost = 2.0 + 0.5 * step;
    const double bump = local ? 0.10 + 0.01 * step : 0.10 + 0.05 * step;
    ArmSpec arm{"coupon" + std::to_string(k), {}};
    for (int s : crucial) {
      Vector row = control.row(s, 0);
      const int from = s == 4 ? 4 : s + 1;
      row(0) += bump;
      row(from) -= bump;
      arm.overrides[s] = {row, control.r_mean()(s, 0) - cost, opt.r_std};
    }
    arms.push_back(std::move(arm));
  }
  return TreatmentSpec(crucial, arms);
}

Experiment clv_experiment(const ClvOptions& opt) {
  MdpModel base = clv_control_model(opt.r_std);
  return Experiment(base, clv_spec(base, opt));
}

Experiment clv_null_experiment(double r_std) {
  MdpModel base = clv_control_model(r_std);
  ArmSpec same{"same", {}};
  same.overrides[4] = {base.row(4, 0), base.r_mean()(4, 0), base.r_std()(4, 0)};
  return Experiment(base, TreatmentSpec({4}, {{"c", {}}, same}));
}

}  // namespace mdplab
