#pragma once

#include "mdplab/treatments.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace mdplab {

struct InstanceOptions {
  int k_min = 2;
  int k_max = 6;
  std::vector<double> gammas{0.5, 0.8, 0.95};
  int n_arms = 2;
  bool local = false;  // crucial set of random size instead of one state
  int max_tries = 1000;
};

// Dirichlet(1) rows, rewards U(-1, 1), reward std U(0, 1). Treatment arms
// redraw the crucial rows. Rejection-sampled until every arm chain and the
// mixed chains are ergodic.
Experiment random_experiment(std::mt19937_64& rng, const InstanceOptions& opt);

MdpModel random_model(std::mt19937_64& rng, int K, int A, double gamma);
Vector dirichlet_row(std::mt19937_64& rng, int K);

}  // namespace mdplab
