#pragma once

#include "mdplab/estimators.hpp"
#include "mdplab/treatments.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdplab {

enum class EstimatorKind { MB, TD, AB, IS, PI, Naive, DQ, DQ_IS };

const char* estimator_name(EstimatorKind k);
std::optional<EstimatorKind> parse_estimator(const std::string& name);
std::vector<EstimatorKind> parse_estimator_list(const std::string& csv);
bool needs_two_arms(EstimatorKind k);

struct CampaignConfig {
  std::vector<EstimatorKind> estimators;
  std::size_t T = 1000;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  int state = 0;
  int arm_i = -1;  // -1: arm with the largest true ATE at `state`
  int arm_j = 0;
  int policy_arm = 0;  // fixed policy for MB and TD
  std::optional<int> start;  // stationary start when empty
};

struct ReplicationRecord {
  std::size_t rep = 0;
  EstimatorKind estimator = EstimatorKind::MB;
  double estimate = 0.0;
  double plug_in_var = 0.0;  // NaN when unavailable
  int ci = -1;               // -1 suppressed, 0 miss, 1 cover
  std::vector<double> arm_ate;  // ATE(i, 0) at the state for every arm i >= 1
};

struct SummaryRow {
  std::string estimator;
  int state = 0;
  double emp_mean = 0.0;
  double emp_sd = 0.0;
  double bias = 0.0;
  double mse_norm = 0.0;
  double sigma_theory = 0.0;  // asymptotic variance of sqrt(T)(estimate - truth)
  double ci95_coverage = 0.0;
  double truth = 0.0;
  double mse = 0.0;
  std::size_t reps = 0;
};

struct ArmRow {
  std::string estimator;
  int arm = 0;
  int state = 0;
  double emp_mean = 0.0;
  double emp_se = 0.0;
  double truth = 0.0;
};

struct CampaignResult {
  CampaignConfig config;
  int arm_i = 0;
  int arm_j = 0;
  std::vector<ReplicationRecord> records;  // rep-major
  std::vector<SummaryRow> summary;
  std::vector<ArmRow> arms;
  const SummaryRow& row(EstimatorKind k) const;
};

// Replications fan out over OpenMP threads; each draws from seeds derived
// from (seed, replication, stream), so results do not depend on scheduling.
CampaignResult run_campaign(const Experiment& exp, const CampaignConfig& cfg);
// Single-threaded reference with identical output.
CampaignResult run_campaign_serial(const Experiment& exp, const CampaignConfig& cfg);

// summary.csv, arms.csv, replications.csv, provenance.json
void write_campaign(const CampaignResult& res, const Experiment& exp, const std::string& dir);
std::string summary_csv(const CampaignResult& res);

}  // namespace mdplab
