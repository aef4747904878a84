#include "mdplab/instances.hpp"

#include <algorithm>
#include <numeric>

namespace mdplab {

Vector dirichlet_row(std::mt19937_64& rng, int K) {
  std::gamma_distribution<double> g(1.0, 1.0);
  Vector p(K);
  for (int k = 0; k < K; ++k) p(k) = g(rng);
  return p / p.sum();
}

MdpModel random_model(std::mt19937_64& rng, int K, int A, double gamma) {
  std::uniform_real_distribution<double> ur(-1.0, 1.0), us(0.0, 1.0);
  std::vector<Matrix> P(A, Matrix(K, K));
  Matrix rm(K, A), rs(K, A);
  for (int a = 0; a < A; ++a) {
    for (int s = 0; s < K; ++s) {
      P[a].row(s) = dirichlet_row(rng, K).transpose();
      rm(s, a) = ur(rng);
      rs(s, a) = us(rng);
    }
  }
  std::vector<std::string> states, actions;
  for (int s = 0; s < K; ++s) states.push_back("s" + std::to_string(s + 1));
  for (int a = 0; a < A; ++a) actions.push_back(a == 0 ? "c" : "t" + std::to_string(a));
  return MdpModel(gamma, states, actions, std::move(P), std::move(rm), std::move(rs));
}

namespace {

bool all_ergodic(const Experiment& exp) {
  try {
    for (int i = 0; i < exp.num_arms(); ++i) {
      if (!check_ergodicity(exp.arm_chain(i).P).ergodic()) return false;
    }
    stationary_distribution(exp.model(), exp.mixed_policy(exp.uniform_weights()));
    if (exp.num_arms() >= 2) {
      stationary_distribution(exp.model(), exp.mixed_policy(exp.treatment_weights()));
    }
  } catch (const ModelError&) {
    return false;
  }
  return true;
}

}  // namespace

Experiment random_experiment(std::mt19937_64& rng, const InstanceOptions& opt) {
  for (int attempt = 0; attempt < opt.max_tries; ++attempt) {
    std::uniform_int_distribution<int> uk(opt.k_min, opt.k_max);
    std::uniform_int_distribution<std::size_t> ug(0, opt.gammas.size() - 1);
    const int K = uk(rng);
    const double gamma = opt.gammas[ug(rng)];
    MdpModel base = random_model(rng, K, opt.n_arms, gamma);

    std::vector<int> crucial;
    if (opt.local) {
      std::uniform_int_distribution<int> usz(1, K);
      std::vector<int> perm(K);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      crucial.assign(perm.begin(), perm.begin() + usz(rng));
    } else {
      std::uniform_int_distribution<int> us(0, K - 1);
      crucial.push_back(us(rng));
    }
    std::vector<ArmSpec> arms;
    for (int i = 0; i < opt.n_arms; ++i) arms.push_back({base.action_names()[i], {}});
    Experiment exp(base, TreatmentSpec(crucial, arms));
    if (all_ergodic(exp)) return exp;
  }
  throw ModelError("could not draw an ergodic instance");
}

}  // namespace mdplab
