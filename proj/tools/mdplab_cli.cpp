// mdplab command line: value | variance | campaign | clv | audit | simulate | estimate

#include "mdplab/audit.hpp"
#include "mdplab/campaign.hpp"
#include "mdplab/ccrb.hpp"
#include "mdplab/clv.hpp"
#include "mdplab/io.hpp"
#include "mdplab/theory_checks.hpp"

#include <CLI11.hpp>

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace mdplab;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kAuditFailure = 3;

struct Common {
  std::string model;
  std::string spec;
  std::string policy;
  std::string out;
  std::string estimators = "AB,IS,PI";
  std::size_t T = 1000;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  int state = 0;
  int arm = 0;
  int arm_i = -1;
  int arm_j = 0;
  int threads = 0;
};

Experiment load_experiment(const Common& c) {
  MdpModel m = model_from_json(read_json_file(c.model));
  if (c.spec.empty()) {
    return Experiment(m, TreatmentSpec({0}, {{m.action_names()[0], {}}}));
  }
  return Experiment(m, spec_from_json(read_json_file(c.spec), m));
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json_file(out, j);
  }
}

int cmd_value(const Common& c) {
  MdpModel m = model_from_json(read_json_file(c.model));
  MdpModel model = m;
  PolicyMatrix pi;
  if (!c.policy.empty()) {
    pi = policy_from_json(read_json_file(c.policy), m);
  } else if (!c.spec.empty()) {
    Experiment e(m, spec_from_json(read_json_file(c.spec), m));
    model = e.model();
    pi = e.arm_policy(c.arm);
  } else {
    pi = PolicyMatrix::deterministic(m.num_actions(), std::vector<int>(m.num_states(), 0));
  }
  InducedChain chain = induce_chain(model, pi);
  ErgodicityCertificate cert = check_ergodicity(chain.P);
  json j = {{"model_hash", model_hash(model)}, {"ergodicity", to_json(cert)}};
  j["V"] = to_json(value_function(chain.P, chain.r, model.gamma()));
  j["rho"] = to_json(visitation(chain.P, model.gamma(), c.state));
  if (!cert.ergodic()) {
    emit(j, c.out);
    std::cerr << "error: induced chain is not ergodic";
    for (int s : cert.unreached) std::cerr << " " << model.state_names()[s];
    std::cerr << "\n";
    return kConfigError;
  }
  j["mu"] = to_json(stationary_distribution(chain.P));
  emit(j, c.out);
  return kOk;
}

int cmd_variance(const Common& c, const std::string& estimator) {
  Experiment e = load_experiment(c);
  json j;
  if (estimator == "MB" || estimator == "GM") {
    const PolicyMatrix& pi = e.arm_policy(c.arm);
    VarianceReport r = estimator == "MB" ? sigma_mb(e.model(), pi, c.state)
                                         : sigma_gm(e.model(), pi, c.state);
    j["variance"] = to_json(r);
    j["ccrb"] = to_json(ccrb_value(e.model(), pi));
  } else {
    Design d;
    if (estimator == "AB") d = Design::AB;
    else if (estimator == "IS") d = Design::IS;
    else if (estimator == "PI") d = Design::PI;
    else throw ConfigError("unknown estimator '" + estimator + "' (MB, GM, AB, IS, PI)");
    int i = c.arm_i >= 0 ? c.arm_i : 1;
    VarianceReport r = sigma_design(e, d, i, c.arm_j, c.state);
    j["variance"] = to_json(r);
    BoundReport b = d == Design::AB ? ccrb_ate(e, i, c.arm_j) : ccrb_ate_shared(e, i, c.arm_j);
    j["ccrb"] = to_json(b);
    j["ccrb_margin"] = b.margin(r.full);
    j["comparison"] = to_json(compare_variances(e));
  }
  emit(j, c.out);
  return kOk;
}

void print_summary(const CampaignResult& res) {
  std::cout << summary_csv(res);
}

CampaignConfig campaign_config(const Common& c) {
  CampaignConfig cfg;
  cfg.estimators = parse_estimator_list(c.estimators);
  cfg.T = c.T;
  cfg.reps = c.reps;
  cfg.seed = c.seed;
  cfg.state = c.state;
  cfg.arm_i = c.arm_i;
  cfg.arm_j = c.arm_j;
  cfg.policy_arm = c.arm;
  return cfg;
}

int cmd_campaign(const Common& c) {
  Experiment e = load_experiment(c);
  CampaignResult res = run_campaign(e, campaign_config(c));
  if (!c.out.empty()) write_campaign(res, e, c.out);
  print_summary(res);
  return kOk;
}

int cmd_clv(Common c, const std::string& variant, const std::string& schedule, int arms,
            double r_std) {
  Experiment e;
  if (variant == "null") {
    e = clv_null_experiment(r_std);
  } else {
    ClvOptions opt;
    if (variant == "sst") opt.variant = ClvVariant::SST;
    else if (variant == "local") opt.variant = ClvVariant::Local;
    else throw ConfigError("variant must be sst, local or null");
    if (schedule == "main") opt.schedule = ClvSchedule::Main;
    else if (schedule == "appendix") opt.schedule = ClvSchedule::Appendix;
    else throw ConfigError("schedule must be main or appendix");
    opt.num_arms = arms;
    opt.r_std = r_std;
    e = clv_experiment(opt);
  }
  CampaignResult res = run_campaign(e, campaign_config(c));
  if (!c.out.empty()) {
    write_campaign(res, e, c.out);
    write_json_file((std::filesystem::path(c.out) / "model.json").string(), model_to_json(e.base()));
    write_json_file((std::filesystem::path(c.out) / "spec.json").string(),
                    spec_to_json(e.spec(), e.base()));
  }
  print_summary(res);
  return kOk;
}

int cmd_audit(const Common& c, int instances, const std::string& mutant) {
  AuditConfig cfg;
  cfg.instances = instances;
  cfg.ccrb_instances = std::min(instances, 200);
  cfg.trajectories = std::min(instances, 200);
  cfg.seed = c.seed;
  if (mutant == "broken-sharing") cfg.is_split = split_is_shares_crucial;
  else if (!mutant.empty()) throw ConfigError("unknown mutant '" + mutant + "'");
  AuditReport rep = run_audit(cfg);
  for (const AuditLine& l : rep.lines) {
    std::printf("%-4s %-28s checked=%d failed=%d worst=%.3e tol=%.1e\n", l.pass() ? "PASS" : "FAIL",
                l.name.c_str(), l.checked, l.failed, l.worst, l.tolerance);
  }
  return rep.pass() ? kOk : kAuditFailure;
}

int cmd_simulate(const Common& c, const std::string& weights_csv) {
  Experiment e = load_experiment(c);
  std::vector<double> w;
  if (weights_csv.empty()) {
    w = e.uniform_weights();
  } else {
    std::stringstream ss(weights_csv);
    std::string item;
    while (std::getline(ss, item, ',')) w.push_back(std::stod(item));
  }
  Trajectory t = sample_experiment(e, w, c.T, std::nullopt, c.seed);
  t.model_hash = model_hash(e.model());
  if (c.out.empty()) {
    write_trajectory(std::cout, t);
  } else {
    std::ofstream f(c.out);
    if (!f) throw ConfigError("cannot write " + c.out);
    write_trajectory(f, t);
  }
  return kOk;
}

int cmd_estimate(const Common& c, const std::string& traj_path) {
  Experiment e = load_experiment(c);
  std::ifstream f(traj_path);
  if (!f) throw ConfigError("cannot open " + traj_path);
  Trajectory t = read_trajectory(f);
  if (!t.model_hash.empty() && t.model_hash != model_hash(e.model())) {
    throw ConfigError("trajectory was generated from a different model");
  }
  json out = json::array();
  int i = c.arm_i >= 0 ? c.arm_i : (e.num_arms() > 1 ? 1 : 0);
  for (EstimatorKind k : parse_estimator_list(c.estimators)) {
    switch (k) {
      case EstimatorKind::MB: out.push_back(to_json(estimate_mb(t, e.gamma()))); break;
      case EstimatorKind::TD: out.push_back(to_json(estimate_td(t, e.gamma()))); break;
      case EstimatorKind::AB: out.push_back(to_json(estimate_ab(t, e).report(i, c.arm_j))); break;
      case EstimatorKind::IS: out.push_back(to_json(estimate_is(t, e).report(i, c.arm_j))); break;
      case EstimatorKind::PI: out.push_back(to_json(estimate_pi(t, e).report(i, c.arm_j))); break;
      case EstimatorKind::Naive:
        out.push_back(to_json(estimate_naive(t, e).report(i, c.arm_j)));
        break;
      case EstimatorKind::DQ: out.push_back(to_json(estimate_dq(t, e).report(i, c.arm_j))); break;
      case EstimatorKind::DQ_IS:
        out.push_back(to_json(estimate_dq_is(t, e).report(i, c.arm_j)));
        break;
    }
  }
  std::cout << out.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimation and variance analysis for treatment effects in Markov models"};
  app.require_subcommand(1);
  Common c;

  auto add_model = [&](CLI::App* s, bool need_spec) {
    s->add_option("--model", c.model, "MDP JSON file")->required();
    auto* o = s->add_option("--spec", c.spec, "treatment spec JSON file");
    if (need_spec) o->required();
    s->add_option("--state", c.state, "evaluation state index");
    s->add_option("--out", c.out, "output path");
    s->add_option("--threads", c.threads, "OpenMP threads (0 = runtime default)");
  };
  auto add_run = [&](CLI::App* s) {
    s->add_option("--T", c.T, "transitions per trajectory");
    s->add_option("--reps", c.reps, "replications");
    s->add_option("--seed", c.seed, "master seed");
    s->add_option("--estimators", c.estimators, "comma list: MB,TD,AB,IS,PI,Naive,DQ,DQ-IS");
    s->add_option("--arm-i", c.arm_i, "treatment arm of the target pair (default best)");
    s->add_option("--arm-j", c.arm_j, "reference arm of the target pair");
    s->add_option("--policy-arm", c.arm, "arm whose policy MB and TD evaluate");
  };

  auto* value = app.add_subcommand("value", "value function, stationary law, visitation");
  add_model(value, false);
  value->add_option("--policy", c.policy, "policy JSON file");
  value->add_option("--arm", c.arm, "arm of --spec to evaluate");

  std::string estimator = "IS";
  auto* variance = app.add_subcommand("variance", "closed-form variances and bounds");
  add_model(variance, false);
  variance->add_option("--estimator", estimator, "MB, GM, AB, IS or PI");
  variance->add_option("--arm", c.arm, "arm policy for MB and GM");
  variance->add_option("--arm-i", c.arm_i, "treatment arm");
  variance->add_option("--arm-j", c.arm_j, "reference arm");

  auto* campaign = app.add_subcommand("campaign", "Monte Carlo campaign");
  add_model(campaign, false);
  add_run(campaign);

  std::string variant = "sst", schedule = "main";
  int arms = 2;
  double r_std = 0.0;
  auto* clv = app.add_subcommand("clv", "customer lifetime value campaign");
  clv->add_option("--variant", variant, "sst, local or null");
  clv->add_option("--schedule", schedule, "main or appendix");
  clv->add_option("--arms", arms, "arms including control");
  clv->add_option("--r-std", r_std, "reward noise std");
  clv->add_option("--state", c.state, "evaluation state index");
  clv->add_option("--out", c.out, "output directory");
  clv->add_option("--threads", c.threads, "OpenMP threads");
  add_run(clv);

  int instances = 500;
  std::string mutant;
  auto* audit = app.add_subcommand("audit", "randomized checks of the variance theory");
  audit->add_option("--instances", instances, "random instances per check");
  audit->add_option("--seed", c.seed, "master seed");
  audit->add_option("--inject-mutant", mutant, "broken-sharing");
  audit->add_option("--threads", c.threads, "OpenMP threads");

  std::string weights;
  auto* simulate = app.add_subcommand("simulate", "write one trajectory as JSON lines");
  add_model(simulate, false);
  simulate->add_option("--T", c.T, "transitions");
  simulate->add_option("--seed", c.seed, "seed");
  simulate->add_option("--weights", weights, "arm weights, comma separated");

  std::string traj_path;
  auto* estimate = app.add_subcommand("estimate", "estimate from a trajectory file");
  add_model(estimate, false);
  estimate->add_option("--trajectory", traj_path, "JSON lines trajectory")->required();
  estimate->add_option("--estimators", c.estimators, "comma list");
  estimate->add_option("--arm-i", c.arm_i, "treatment arm");
  estimate->add_option("--arm-j", c.arm_j, "reference arm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  if (c.threads > 0) omp_set_num_threads(c.threads);

  try {
    if (*value) return cmd_value(c);
    if (*variance) return cmd_variance(c, estimator);
    if (*campaign) return cmd_campaign(c);
    if (*clv) return cmd_clv(c, variant, schedule, arms, r_std);
    if (*audit) return cmd_audit(c, instances, mutant);
    if (*simulate) return cmd_simulate(c, weights);
    if (*estimate) return cmd_estimate(c, traj_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SplitContractError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
