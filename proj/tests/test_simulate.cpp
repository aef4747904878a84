#include "mdplab/audit.hpp"
#include "mdplab/clv.hpp"
#include "mdplab/instances.hpp"
#include "mdplab/io.hpp"
#include "mdplab/rng.hpp"
#include "mdplab/simulate.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace mdplab;

namespace {

bool same(const Transition& a, const Transition& b) {
  return a.s == b.s && a.a == b.a && a.s_next == b.s_next && a.r == b.r && a.arm == b.arm;
}

Experiment three_arm_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  InstanceOptions opt;
  opt.n_arms = 3;
  return random_experiment(rng, opt);
}

}  // namespace

TEST(Rng, NormalHasUnitMoments) {
  Rng rng(99);
  double s = 0.0, s2 = 0.0;
  const int N = 400000;
  for (int i = 0; i < N; ++i) {
    double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / N, 0.0, 0.01);
  EXPECT_NEAR(s2 / N, 1.0, 0.01);
}

TEST(Rng, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 1000; ++r)
    for (std::uint64_t st = 0; st < 3; ++st) seen.insert(derive_seed(42, r, st));
  EXPECT_EQ(seen.size(), 3000u);
}

TEST(Sample, SameSeedSameTrajectory) {
  Experiment e = three_arm_instance(1);
  Trajectory a = sample_experiment(e, e.uniform_weights(), 500, std::nullopt, 17);
  Trajectory b = sample_experiment(e, e.uniform_weights(), 500, std::nullopt, 17);
  Trajectory c = sample_experiment(e, e.uniform_weights(), 500, std::nullopt, 18);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  bool differs = false;
  for (std::size_t t = 0; t < a.steps.size(); ++t) {
    EXPECT_TRUE(same(a.steps[t], b.steps[t]));
    differs = differs || !same(a.steps[t], c.steps[t]);
  }
  EXPECT_TRUE(differs);
}

TEST(Sample, StepsChainAndRespectArmRule) {
  Experiment e = three_arm_instance(2);
  Trajectory t = sample_experiment(e, e.uniform_weights(), 2000, 0, 5);
  EXPECT_EQ(t.steps.front().s, 0);
  for (std::size_t k = 0; k + 1 < t.steps.size(); ++k) {
    EXPECT_EQ(t.steps[k].s_next, t.steps[k + 1].s);
  }
  for (const Transition& x : t.steps) {
    EXPECT_EQ(x.a, e.crucial(x.s) ? x.arm : 0);
    EXPECT_GT(e.model().p(x.s, x.a, x.s_next), 0.0);
  }
}

TEST(Sample, FrequenciesApproachStationaryLaw) {
  Experiment e = clv_experiment({ClvVariant::SST, ClvSchedule::Main, 2, 0.0});
  Trajectory t = sample_experiment(e, e.uniform_weights(), 400000, std::nullopt, 3);
  Vector mu = stationary_distribution(e.model(), e.mixed_policy(e.uniform_weights()));
  EXPECT_LT((state_frequencies(t) - mu).lpNorm<Eigen::Infinity>(), 0.01);
  EmpiricalModel m = empirical_model(t.steps, 5, 2);
  EXPECT_LT((m.P_sa[0] - e.model().transitions(0)).lpNorm<Eigen::Infinity>(), 0.02);
  EXPECT_NEAR(m.P_sa[1](4, 0), 0.2, 0.01);
}

TEST(Sample, DeterministicRewardsWhenStdIsZero) {
  Experiment e = clv_experiment({ClvVariant::SST, ClvSchedule::Main, 2, 0.0});
  Trajectory t = sample_experiment(e, e.uniform_weights(), 1000, std::nullopt, 4);
  for (const Transition& x : t.steps) EXPECT_EQ(x.r, e.model().r_mean()(x.s, x.a));
}

TEST(Sample, RejectsInvalidWeights) {
  Experiment e = three_arm_instance(3);
  EXPECT_THROW(sample_experiment(e, {0.5, 0.5}, 10, std::nullopt, 1), ModelError);
  EXPECT_THROW(sample_experiment(e, {0.5, 0.6, -0.1}, 10, std::nullopt, 1), ModelError);
}

TEST(Split, AbPartitionsByDrawnArm) {
  Experiment e = three_arm_instance(4);
  Trajectory t = sample_experiment(e, e.uniform_weights(), 3000, std::nullopt, 9);
  SplitDatasets d = split_ab(t, 3);
  std::size_t total = 0;
  for (int i = 0; i < 3; ++i) {
    total += d.per_arm[i].size();
    for (const Transition& x : d.per_arm[i]) EXPECT_EQ(x.arm, i);
  }
  EXPECT_EQ(total, t.steps.size());
}

TEST(Split, IsSharesOnlyNonCrucialTransitions) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Experiment e = three_arm_instance(100 + seed);
    Trajectory t = sample_experiment(e, e.uniform_weights(), 500, std::nullopt, seed);
    SplitDatasets d = split_is(t, e);
    EXPECT_TRUE(is_split_valid(t, e, d));
    EXPECT_FALSE(is_split_valid(t, e, split_is_shares_crucial(t, e)));
    std::size_t shared = 0;
    for (const Transition& x : t.steps) shared += e.crucial(x.s) ? 0 : 1;
    for (int i = 0; i < 3; ++i) {
      std::size_t own = 0;
      for (const Transition& x : d.per_arm[i]) {
        if (e.crucial(x.s)) {
          EXPECT_EQ(x.arm, i);
          ++own;
        }
      }
      EXPECT_EQ(d.per_arm[i].size(), shared + own);
    }
  }
}

TEST(Split, PiRejectsControlDrawsAtCrucialStates) {
  Experiment e = three_arm_instance(5);
  Trajectory bad = sample_experiment(e, e.uniform_weights(), 2000, std::nullopt, 1);
  EXPECT_THROW(split_pi(bad, e), SplitContractError);
  Trajectory good = sample_experiment(e, e.treatment_weights(), 2000, std::nullopt, 1);
  SplitDatasets d = split_pi(good, e);
  EXPECT_TRUE(d.per_arm[0].empty());
  for (int i = 1; i < 3; ++i)
    for (const Transition& x : d.per_arm[i]) {
      EXPECT_TRUE(e.crucial(x.s));
      EXPECT_EQ(x.arm, i);
    }
}

TEST(Empirical, UnvisitedRowsFallBackToUniform) {
  std::vector<Transition> data{{0, 0, 1, 2.0, 0}, {1, 0, 0, 4.0, 0}, {0, 0, 0, 6.0, 0}};
  EmpiricalModel m = empirical_model(data, 3, 1);
  EXPECT_FALSE(m.complete());
  EXPECT_EQ(m.unvisited, std::vector<int>{2});
  EXPECT_DOUBLE_EQ(m.P(2, 0), 1.0 / 3);
  EXPECT_DOUBLE_EQ(m.r(2), 0.0);
  EXPECT_DOUBLE_EQ(m.P(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(m.r(0), 4.0);
  EXPECT_DOUBLE_EQ(m.r_var(0), 4.0);
}

TEST(TrajectoryIo, JsonLinesRoundTrip) {
  std::mt19937_64 rng(8);
  MdpModel m = random_model(rng, 4, 2, 0.8);
  Matrix pi = Matrix::Constant(4, 2, 0.5);
  Trajectory t = sample_trajectory(m, PolicyMatrix(pi), 300, std::nullopt, 12);
  t.model_hash = model_hash(m);
  std::stringstream ss;
  write_trajectory(ss, t);
  Trajectory back = read_trajectory(ss);
  EXPECT_EQ(back.seed, 12u);
  EXPECT_EQ(back.model_hash, t.model_hash);
  ASSERT_EQ(back.steps.size(), t.steps.size());
  for (std::size_t k = 0; k < t.steps.size(); ++k) EXPECT_TRUE(same(back.steps[k], t.steps[k]));
}

TEST(ModelIo, JsonRoundTripPreservesHash) {
  std::mt19937_64 rng(10);
  MdpModel m = random_model(rng, 5, 3, 0.95);
  MdpModel back = model_from_json(json::parse(model_to_json(m).dump()));
  EXPECT_EQ(model_hash(back), model_hash(m));
  EXPECT_EQ(back.transitions(2), m.transitions(2));
  Experiment e = clv_experiment({ClvVariant::Local, ClvSchedule::Main, 3, 0.0});
  TreatmentSpec s = spec_from_json(spec_to_json(e.spec(), e.base()), e.base());
  Experiment e2(e.base(), s);
  EXPECT_EQ(model_hash(e2.model()), model_hash(e.model()));
}

TEST(ModelIo, MalformedInputIsAConfigError) {
  EXPECT_THROW(model_from_json(json::parse(R"({"gamma":0.9})")), ConfigError);
  json bad = model_to_json(clv_control_model());
  bad["P"][0][0][0] = 0.7;
  EXPECT_THROW(model_from_json(bad), ModelError);
}
