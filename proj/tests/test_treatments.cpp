#include "mdplab/clv.hpp"
#include "mdplab/instances.hpp"
#include "mdplab/treatments.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mdplab;

namespace {

void expect_vec(const Vector& v, std::initializer_list<double> want, double tol) {
  ASSERT_EQ(v.size(), static_cast<int>(want.size()));
  int i = 0;
  for (double w : want) EXPECT_NEAR(v(i++), w, tol) << "entry " << i - 1;
}

}  // namespace

TEST(TreatmentSpec, RejectsOverrideOfNonCrucialState) {
  ArmSpec t{"t", {}};
  t.overrides[1] = {Vector::Constant(2, 0.5), 0.0, 0.0};
  EXPECT_THROW(TreatmentSpec({0}, {{"c", {}}, t}), ModelError);
}

TEST(TreatmentSpec, RejectsControlOverrides) {
  ArmSpec c{"c", {}};
  c.overrides[0] = {Vector::Constant(2, 0.5), 0.0, 0.0};
  EXPECT_THROW(TreatmentSpec({0}, {c}), ModelError);
}

TEST(TreatmentSpec, RejectsDuplicatesAndEmptyCrucialSet) {
  EXPECT_THROW(TreatmentSpec({}, {{"c", {}}}), ModelError);
  EXPECT_THROW(TreatmentSpec({0, 0}, {{"c", {}}}), ModelError);
  EXPECT_THROW(TreatmentSpec({0}, {{"c", {}}, {"c", {}}}), ModelError);
}

TEST(Experiment, ArmWithoutDynamicsIsAnError) {
  MdpModel base = clv_control_model();
  EXPECT_THROW(Experiment(base, TreatmentSpec({4}, {{"c", {}}, {"ghost", {}}})), ModelError);
}

TEST(Experiment, NonCrucialRowsMatchControlForEveryArm) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 50; ++k) {
    InstanceOptions opt;
    opt.n_arms = 2 + k % 3;
    opt.local = k % 2 == 1;
    Experiment e = random_experiment(rng, opt);
    for (int i = 0; i < e.num_arms(); ++i) {
      const InducedChain& ci = e.arm_chain(i);
      const InducedChain& c0 = e.arm_chain(0);
      for (int s = 0; s < e.num_states(); ++s) {
        if (e.crucial(s)) continue;
        EXPECT_EQ(ci.P.row(s), c0.P.row(s));
        EXPECT_EQ(ci.r(s), c0.r(s));
        EXPECT_EQ(ci.sigma_sq(s), c0.sigma_sq(s));
      }
    }
  }
}

TEST(Experiment, ArmPoliciesPlayTheirActionOnlyAtCrucialStates) {
  Experiment e = clv_experiment({ClvVariant::Local, ClvSchedule::Main, 4, 0.0});
  for (int i = 0; i < 4; ++i) {
    ArmRealization a = realize_arm(e, i);
    for (int s = 0; s < 5; ++s) {
      int expect = e.crucial(s) ? i : 0;
      EXPECT_EQ(a.policy(s, expect), 1.0);
    }
  }
  PolicyMatrix mix = mixed_policy(e, e.uniform_weights());
  EXPECT_EQ(mix(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(mix(3, 2), 0.25);
}

TEST(TrueAte, NullTreatmentHasZeroEffect) {
  Experiment e = clv_null_experiment();
  Vector d = true_ate(e, 1, 0);
  EXPECT_EQ(d.lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(TrueAte, IsAntisymmetric) {
  std::mt19937_64 rng(4);
  InstanceOptions opt;
  opt.n_arms = 4;
  Experiment e = random_experiment(rng, opt);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(true_ate(e, i, j), -true_ate(e, j, i));
}

// Reference values computed with an independent dense solver.
TEST(Clv, SstMainScheduleEffects) {
  Experiment e = clv_experiment({ClvVariant::SST, ClvSchedule::Main, 6, 0.0});
  expect_vec(true_ate(e, 1, 0),
             {1.69646909322, 2.544703639829, 4.410819642371, 7.690659889262, 12.456930198784},
             1e-9);
  expect_vec(true_ate(e, 5, 0),
             {4.076784717484, 6.115177076227, 10.599640265459, 18.481424052596, 29.935247782671},
             1e-9);
  EXPECT_EQ(best_arm(e, kClvEvalState), 5);
}

TEST(Clv, AppendixScheduleShiftsByOneStep) {
  Experiment e = clv_experiment({ClvVariant::SST, ClvSchedule::Appendix, 2, 0.0});
  expect_vec(true_ate(e, 1, 0),
             {2.476918696872, 3.715378045308, 6.439988611868, 11.228698092488, 18.187660145605},
             1e-9);
  Experiment l = clv_experiment({ClvVariant::Local, ClvSchedule::Appendix, 2, 0.0});
  expect_vec(true_ate(l, 1, 0),
             {3.529274590076, 5.293911885115, 9.176113934199, 11.744663144835, 13.387740855787},
             1e-9);
}

TEST(Clv, LocalMainScheduleEffects) {
  Experiment e = clv_experiment({ClvVariant::Local, ClvSchedule::Main, 6, 0.0});
  expect_vec(true_ate(e, 1, 0),
             {3.567582708288, 5.351374062432, 9.275715041549, 11.755002956646, 13.392487006318},
             1e-9);
  EXPECT_EQ(best_arm(e, kClvEvalState), 1);
  EXPECT_EQ(e.spec().crucial_states(), (std::vector<int>{2, 3, 4}));
}

TEST(Clv, CouponRowsMoveMassToFirstState) {
  Experiment e = clv_experiment({ClvVariant::SST, ClvSchedule::Main, 3, 0.0});
  Vector row = e.model().row(4, 2);
  EXPECT_NEAR(row(0), 0.25, 1e-15);
  EXPECT_NEAR(row(4), 0.75, 1e-15);
  EXPECT_DOUBLE_EQ(e.model().r_mean()(4, 2), -2.5);
}
