#include "mdplab/campaign.hpp"

#include "mdplab/io.hpp"
#include "mdplab/rng.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace mdplab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Plan {
  int i = 0;
  int j = 0;
  bool need_mix = false;
  bool need_pi = false;
  bool need_fixed = false;
  double truth_ate = 0.0;
  double truth_value = 0.0;
};

Plan make_plan(const Experiment& exp, const CampaignConfig& cfg) {
  if (cfg.estimators.empty()) throw ModelError("no estimators selected");
  if (cfg.T == 0 || cfg.reps == 0) throw ModelError("T and reps must be positive");
  if (cfg.state < 0 || cfg.state >= exp.num_states()) throw ModelError("state out of range");
  if (cfg.policy_arm < 0 || cfg.policy_arm >= exp.num_arms()) {
    throw ModelError("policy arm out of range");
  }
  Plan p;
  for (EstimatorKind k : cfg.estimators) {
    if (needs_two_arms(k) && exp.num_arms() < 2) {
      throw ModelError(std::string(estimator_name(k)) + " needs at least two arms");
    }
    if (k == EstimatorKind::MB || k == EstimatorKind::TD) p.need_fixed = true;
    else if (k == EstimatorKind::PI) p.need_pi = true;
    else p.need_mix = true;
  }
  if (exp.num_arms() >= 2) {
    p.i = cfg.arm_i >= 0 ? cfg.arm_i : best_arm(exp, cfg.state);
    p.j = cfg.arm_j;
    if (p.i >= exp.num_arms() || p.j < 0 || p.j >= exp.num_arms()) {
      throw ModelError("target arm out of range");
    }
    p.truth_ate = true_ate(exp, p.i, p.j)(cfg.state);
  }
  p.truth_value = exp.arm_value(cfg.policy_arm)(cfg.state);
  return p;
}

int cover(double est, double var, std::size_t T, double truth) {
  if (!std::isfinite(var)) return -1;
  double half = kZ95 * std::sqrt(std::max(var, 0.0) / static_cast<double>(T));
  return (est - half <= truth && truth <= est + half) ? 1 : 0;
}

ReplicationRecord ate_record(std::size_t rep, EstimatorKind k, const AteEstimate& est,
                             const Plan& p, const CampaignConfig& cfg, int n) {
  ReplicationRecord r;
  r.rep = rep;
  r.estimator = k;
  r.estimate = est.ate(p.i, p.j)(cfg.state);
  std::optional<double> v = est.plug_in_variance_at(p.i, p.j, cfg.state);
  r.plug_in_var = v ? *v : kNaN;
  r.ci = cover(r.estimate, r.plug_in_var, est.T, p.truth_ate);
  for (int a = 1; a < n; ++a) r.arm_ate.push_back(est.ate(a, 0)(cfg.state));
  return r;
}

void run_replication(const Experiment& exp, const CampaignConfig& cfg, const Plan& p,
                     std::size_t rep, ReplicationRecord* out) {
  const int n = exp.num_arms();
  std::optional<Trajectory> mix, pi, fixed;
  if (p.need_mix) {
    mix = sample_experiment(exp, exp.uniform_weights(), cfg.T, cfg.start,
                            derive_seed(cfg.seed, rep, 0));
  }
  if (p.need_pi) {
    pi = sample_experiment(exp, exp.treatment_weights(), cfg.T, cfg.start,
                           derive_seed(cfg.seed, rep, 1));
  }
  if (p.need_fixed) {
    std::vector<double> w(n, 0.0);
    w[cfg.policy_arm] = 1.0;
    fixed = sample_experiment(exp, w, cfg.T, cfg.start, derive_seed(cfg.seed, rep, 2));
  }
  for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
    EstimatorKind k = cfg.estimators[e];
    ReplicationRecord& r = out[e];
    switch (k) {
      case EstimatorKind::MB:
      case EstimatorKind::TD: {
        EstimateReport rep_v = k == EstimatorKind::MB ? estimate_mb(*fixed, exp.gamma())
                                                      : estimate_td(*fixed, exp.gamma());
        r.rep = rep;
        r.estimator = k;
        r.estimate = rep_v.point(cfg.state);
        EstimateReport mb = k == EstimatorKind::MB ? rep_v : estimate_mb(*fixed, exp.gamma());
        r.plug_in_var = mb.plug_in_variance ? (*mb.plug_in_variance)(cfg.state) : kNaN;
        r.ci = cover(r.estimate, r.plug_in_var, cfg.T, p.truth_value);
        break;
      }
      case EstimatorKind::AB: r = ate_record(rep, k, estimate_ab(*mix, exp), p, cfg, n); break;
      case EstimatorKind::IS: r = ate_record(rep, k, estimate_is(*mix, exp), p, cfg, n); break;
      case EstimatorKind::PI: r = ate_record(rep, k, estimate_pi(*pi, exp), p, cfg, n); break;
      case EstimatorKind::Naive:
        r = ate_record(rep, k, estimate_naive(*mix, exp), p, cfg, n);
        break;
      case EstimatorKind::DQ: r = ate_record(rep, k, estimate_dq(*mix, exp), p, cfg, n); break;
      case EstimatorKind::DQ_IS:
        r = ate_record(rep, k, estimate_dq_is(*mix, exp), p, cfg, n);
        break;
    }
  }
}

double theory(const Experiment& exp, const CampaignConfig& cfg, const Plan& p, EstimatorKind k) {
  switch (k) {
    case EstimatorKind::MB:
    case EstimatorKind::TD:
      return sigma_mb(exp.model(), exp.arm_policy(cfg.policy_arm), cfg.state).at_state;
    case EstimatorKind::AB: return sigma_ab(exp, p.i, p.j, cfg.state).at_state;
    case EstimatorKind::IS: return sigma_is(exp, p.i, p.j, cfg.state).at_state;
    case EstimatorKind::PI: return sigma_pi(exp, p.i, p.j, cfg.state).at_state;
    default: return kNaN;
  }
}

void summarize(const Experiment& exp, const Plan& p, CampaignResult& res) {
  const CampaignConfig& cfg = res.config;
  const std::size_t E = cfg.estimators.size();
  const std::size_t R = cfg.reps;
  const int n = exp.num_arms();
  for (std::size_t e = 0; e < E; ++e) {
    EstimatorKind k = cfg.estimators[e];
    const bool value = k == EstimatorKind::MB || k == EstimatorKind::TD;
    SummaryRow row;
    row.estimator = estimator_name(k);
    row.state = cfg.state;
    row.truth = value ? p.truth_value : p.truth_ate;
    row.reps = R;
    double sum = 0.0, sq = 0.0;
    std::size_t valid = 0, covered = 0;
    for (std::size_t r = 0; r < R; ++r) {
      const ReplicationRecord& rec = res.records[r * E + e];
      sum += rec.estimate;
      sq += (rec.estimate - row.truth) * (rec.estimate - row.truth);
      if (rec.ci >= 0) {
        ++valid;
        covered += rec.ci;
      }
    }
    row.emp_mean = sum / R;
    double ss = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      double d = res.records[r * E + e].estimate - row.emp_mean;
      ss += d * d;
    }
    row.emp_sd = R > 1 ? std::sqrt(ss / (R - 1)) : 0.0;
    row.bias = row.emp_mean - row.truth;
    row.mse = sq / R;
    row.mse_norm = row.truth != 0.0 ? row.mse / (row.truth * row.truth) : kNaN;
    row.sigma_theory = theory(exp, cfg, p, k);
    row.ci95_coverage = valid ? static_cast<double>(covered) / valid : kNaN;
    res.summary.push_back(row);

    if (value) continue;
    for (int a = 1; a < n; ++a) {
      ArmRow ar;
      ar.estimator = row.estimator;
      ar.arm = a;
      ar.state = cfg.state;
      ar.truth = true_ate(exp, a, 0)(cfg.state);
      double s1 = 0.0;
      for (std::size_t r = 0; r < R; ++r) s1 += res.records[r * E + e].arm_ate[a - 1];
      ar.emp_mean = s1 / R;
      double s2 = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        double d = res.records[r * E + e].arm_ate[a - 1] - ar.emp_mean;
        s2 += d * d;
      }
      ar.emp_se = R > 1 ? std::sqrt(s2 / (R - 1)) / std::sqrt(static_cast<double>(R)) : 0.0;
      res.arms.push_back(ar);
    }
  }
}

CampaignResult run(const Experiment& exp, const CampaignConfig& cfg, bool parallel) {
  Plan p = make_plan(exp, cfg);
  CampaignResult res;
  res.config = cfg;
  res.arm_i = p.i;
  res.arm_j = p.j;
  const std::size_t E = cfg.estimators.size();
  res.records.resize(cfg.reps * E);
  if (parallel) {
    std::exception_ptr err;
    const long long R = static_cast<long long>(cfg.reps);
#pragma omp parallel for schedule(dynamic)
    for (long long r = 0; r < R; ++r) {
      try {
        run_replication(exp, cfg, p, static_cast<std::size_t>(r), &res.records[r * E]);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
  } else {
    for (std::size_t r = 0; r < cfg.reps; ++r) run_replication(exp, cfg, p, r, &res.records[r * E]);
  }
  summarize(exp, p, res);
  return res;
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

const char* estimator_name(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::MB: return "MB";
    case EstimatorKind::TD: return "TD";
    case EstimatorKind::AB: return "AB";
    case EstimatorKind::IS: return "IS";
    case EstimatorKind::PI: return "PI";
    case EstimatorKind::Naive: return "Naive";
    case EstimatorKind::DQ: return "DQ";
    case EstimatorKind::DQ_IS: return "DQ-IS";
  }
  return "?";
}

std::optional<EstimatorKind> parse_estimator(const std::string& name) {
  for (EstimatorKind k : {EstimatorKind::MB, EstimatorKind::TD, EstimatorKind::AB,
                          EstimatorKind::IS, EstimatorKind::PI, EstimatorKind::Naive,
                          EstimatorKind::DQ, EstimatorKind::DQ_IS}) {
    if (name == estimator_name(k)) return k;
  }
  return std::nullopt;
}

std::vector<EstimatorKind> parse_estimator_list(const std::string& csv) {
  std::vector<EstimatorKind> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto k = parse_estimator(item);
    if (!k) throw ModelError("unknown estimator '" + item + "'");
    out.push_back(*k);
  }
  return out;
}

bool needs_two_arms(EstimatorKind k) {
  return !(k == EstimatorKind::MB || k == EstimatorKind::TD);
}

const SummaryRow& CampaignResult::row(EstimatorKind k) const {
  for (const SummaryRow& r : summary)
    if (r.estimator == estimator_name(k)) return r;
  throw ModelError(std::string("estimator not in campaign: ") + estimator_name(k));
}

CampaignResult run_campaign(const Experiment& exp, const CampaignConfig& cfg) {
  return run(exp, cfg, true);
}

CampaignResult run_campaign_serial(const Experiment& exp, const CampaignConfig& cfg) {
  return run(exp, cfg, false);
}

std::string summary_csv(const CampaignResult& res) {
  std::ostringstream os;
  os << "estimator,state,emp_mean,emp_sd,bias,mse_norm,sigma_theory,ci95_coverage\n";
  for (const SummaryRow& r : res.summary) {
    os << r.estimator << ',' << r.state << ',' << num(r.emp_mean) << ',' << num(r.emp_sd) << ','
       << num(r.bias) << ',' << num(r.mse_norm) << ',' << num(r.sigma_theory) << ','
       << num(r.ci95_coverage) << '\n';
  }
  return os.str();
}

void write_campaign(const CampaignResult& res, const Experiment& exp, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(fs::path(dir) / name);
    if (!f) throw ConfigError(std::string("cannot write ") + (fs::path(dir) / name).string());
    return f;
  };
  open("summary.csv") << summary_csv(res);

  {
    std::ofstream f = open("arms.csv");
    f << "estimator,arm,state,emp_mean,emp_se,true_ate\n";
    for (const ArmRow& a : res.arms) {
      f << a.estimator << ',' << a.arm << ',' << a.state << ',' << num(a.emp_mean) << ','
        << num(a.emp_se) << ',' << num(a.truth) << '\n';
    }
  }
  {
    std::ofstream f = open("replications.csv");
    f << "rep,estimator,estimate,plug_in_var,ci_covers\n";
    for (const ReplicationRecord& r : res.records) {
      f << r.rep << ',' << estimator_name(r.estimator) << ',' << num(r.estimate) << ','
        << num(r.plug_in_var) << ',' << (r.ci < 0 ? std::string("na") : std::to_string(r.ci))
        << '\n';
    }
  }
  const CampaignConfig& c = res.config;
  json est = json::array();
  for (EstimatorKind k : c.estimators) est.push_back(estimator_name(k));
  json rows = json::array();
  for (const SummaryRow& r : res.summary) {
    rows.push_back({{"estimator", r.estimator}, {"truth", r.truth}, {"mse", r.mse},
                    {"reps", r.reps}});
  }
  json prov = {{"tool", "mdplab"},
               {"model_hash", model_hash(exp.model())},
               {"model", model_to_json(exp.model())},
               {"spec", spec_to_json(exp.spec(), exp.base())},
               {"seed", c.seed},
               {"seed_derivation", "splitmix64 chain over (seed, replication, stream); "
                                   "stream 0 mixed, 1 treatment-only, 2 fixed policy"},
               {"T", c.T},
               {"reps", c.reps},
               {"state", c.state},
               {"arm_i", res.arm_i},
               {"arm_j", res.arm_j},
               {"policy_arm", c.policy_arm},
               {"start", c.start ? json(*c.start) : json("stationary")},
               {"estimators", est},
               {"rows", rows}};
  open("provenance.json") << prov.dump(2) << '\n';
}

}  // namespace mdplab
