// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "oracles.hpp"

#include "mdplab/audit.hpp"
#include "mdplab/campaign.hpp"
#include "mdplab/ccrb.hpp"
#include "mdplab/clv.hpp"
#include "mdplab/instances.hpp"
#include "mdplab/rng.hpp"
#include "mdplab/theory_checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace mdplab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool in_time = secs < budget_s;
  bool ok = o.pass && in_time;
  failures += ok ? 0 : 1;
  std::printf("%s [%d] %s | %s | %.1fs (budget %.0fs)%s\n", ok ? "PASS" : "FAIL", id, name,
              o.detail.c_str(), secs, budget_s, in_time ? "" : " over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void add(Outcome& o, bool ok, const std::string& what) {
  o.pass = o.pass && ok;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what + (ok ? "" : " [x]");
}

Experiment control_only() {
  return Experiment(clv_control_model(), TreatmentSpec({4}, {{"c", {}}}));
}

CampaignConfig config(const std::string& est, std::size_t T, std::size_t reps, std::uint64_t seed) {
  CampaignConfig c;
  c.estimators = parse_estimator_list(est);
  c.T = T;
  c.reps = reps;
  c.seed = seed;
  c.state = kClvEvalState;
  return c;
}

// Variance of sqrt(T)(estimate - truth) against its closed form.
void clt_line(Outcome& o, const CampaignResult& res, EstimatorKind k) {
  const SummaryRow& r = res.row(k);
  double emp = static_cast<double>(res.config.T) * r.emp_sd * r.emp_sd;
  double ratio = emp / r.sigma_theory;
  std::ostringstream os;
  os << r.estimator << " T*var/sigma2=" << fmt("%.4f", ratio)
     << " cover=" << fmt("%.3f", r.ci95_coverage);
  add(o, std::abs(ratio - 1.0) <= 0.10, os.str());
}

void audit_line(Outcome& o, const AuditReport& rep, const std::string& name) {
  const AuditLine& l = rep.line(name);
  std::ostringstream os;
  os << name << " " << l.failed << "/" << l.checked << " worst=" << fmt("%.2e", l.worst);
  add(o, l.pass(), os.str());
}

void benchmark_lines(Outcome& o, const CampaignResult& res) {
  const double R = static_cast<double>(res.config.reps);
  for (EstimatorKind k : {EstimatorKind::AB, EstimatorKind::IS, EstimatorKind::PI}) {
    const SummaryRow& r = res.row(k);
    double se = r.emp_sd / std::sqrt(R);
    std::ostringstream os;
    os << r.estimator << " bias=" << fmt("%.3f", r.bias) << " se=" << fmt("%.3f", se);
    add(o, std::abs(r.bias) < 2.0 * se, os.str());
  }
  double ab = res.row(EstimatorKind::AB).emp_sd;
  double is = res.row(EstimatorKind::IS).emp_sd;
  double pi = res.row(EstimatorKind::PI).emp_sd;
  std::ostringstream os;
  os << "sd PI/IS/AB=" << fmt("%.3f", pi) << "/" << fmt("%.3f", is) << "/" << fmt("%.3f", ab);
  add(o, pi <= is && is <= ab, os.str());
  add(o, is <= 0.75 * ab, "sd IS/AB=" + fmt("%.3f", is / ab));
}

}  // namespace

int main() {
  const std::uint64_t seed = 20240601;

  criterion(1, "MB and TD agree on covered trajectories", 60, [&] {
    double worst = 0.0;
    int done = 0;
    for (std::uint64_t k = 0; done < 200; ++k) {
      std::mt19937_64 rng(derive_seed(seed, k, 1));
      std::uniform_int_distribution<int> uk(2, 6), ut(100, 3000);
      const double gammas[] = {0.5, 0.8, 0.95};
      MdpModel m = random_model(rng, uk(rng), 1, gammas[rng() % 3]);
      PolicyMatrix pi = PolicyMatrix::deterministic(1, std::vector<int>(m.num_states(), 0));
      Trajectory t = sample_trajectory(m, pi, ut(rng), std::nullopt, rng());
      EstimateReport mb = estimate_mb(t, m.gamma(), false);
      if (!mb.flags.empty()) continue;
      worst = std::max(worst, (mb.point - estimate_td(t, m.gamma()).point).lpNorm<Eigen::Infinity>());
      ++done;
    }
    Outcome o;
    add(o, worst < 1e-9, "200 trajectories max|MB-TD|=" + fmt("%.2e", worst));
    return o;
  });

  criterion(2, "value CLT on the control model", 600, [&] {
    CampaignResult res = run_campaign(control_only(), config("MB", 20000, 2000, seed + 2));
    Outcome o;
    clt_line(o, res, EstimatorKind::MB);
    double cov = res.row(EstimatorKind::MB).ci95_coverage;
    add(o, cov >= 0.93 && cov <= 0.97, "coverage=" + fmt("%.4f", cov));
    return o;
  });

  criterion(3, "AB, IS and PI CLT on the two-arm coupon model", 900, [&] {
    Experiment e = clv_experiment({ClvVariant::SST, ClvSchedule::Main, 2, 0.0});
    CampaignResult res = run_campaign(e, config("AB,IS,PI", 20000, 2000, seed + 3));
    Outcome o;
    for (EstimatorKind k : {EstimatorKind::AB, EstimatorKind::IS, EstimatorKind::PI})
      clt_line(o, res, k);
    return o;
  });

  AuditConfig acfg;
  acfg.seed = seed + 4;
  AuditReport audit;
  criterion(4, "variance orderings on random instances", 300, [&] {
    audit = run_audit(acfg);
    Outcome o;
    for (const char* name :
         {"variance-order-sst-n2", "variance-order-sst-n3", "variance-order-sst-n4",
          "variance-order-sst-n5", "variance-order-local-n2", "variance-order-local-n3",
          "equality-conditions"})
      audit_line(o, audit, name);
    return o;
  });

  criterion(5, "constrained Cramer-Rao bounds equal the closed forms", 300, [&] {
    Outcome o;
    for (const char* name : {"ccrb-value", "ccrb-ab", "ccrb-is"}) audit_line(o, audit, name);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      std::mt19937_64 rng(derive_seed(seed, k, 5));
      Experiment e = random_experiment(rng, {});
      const InducedChain& c = e.arm_chain(0);
      Matrix v = oracle::bound(oracle::value_problem({c.P, c.r, c.sigma_sq}, e.gamma()));
      Matrix ab = oracle::bound(oracle::ate_problem(e, 1, 0, false));
      Matrix is = oracle::bound(oracle::ate_problem(e, 1, 0, true));
      worst = std::max({worst, oracle::rel_frob(ccrb_value(e.model(), e.arm_policy(0)).matrix, v),
                        oracle::rel_frob(ccrb_ate(e, 1, 0).matrix, ab),
                        oracle::rel_frob(ccrb_ate_shared(e, 1, 0).matrix, is)});
    }
    add(o, worst < 1e-5, "finite-difference pipeline 20 instances rel-frob=" + fmt("%.2e", worst));
    return o;
  });

  criterion(6, "monotonicity and performance difference", 120, [&] {
    Outcome o;
    audit_line(o, audit, "monotonicity");
    audit_line(o, audit, "performance-difference");
    return o;
  });

  criterion(7, "coupon benchmark with five arms", 600, [&] {
    Outcome o;
    Experiment sst = clv_experiment({ClvVariant::SST, ClvSchedule::Main, 5, 0.0});
    CampaignResult a = run_campaign(sst, config("AB,IS,PI", 350, 1000, seed + 7));
    Outcome os;
    benchmark_lines(os, a);
    o.pass = os.pass;
    o.detail = "sst arm " + std::to_string(a.arm_i) + ": " + os.detail;
    Experiment loc = clv_experiment({ClvVariant::Local, ClvSchedule::Main, 5, 0.0});
    CampaignResult b = run_campaign(loc, config("AB,IS,PI", 2000, 1000, seed + 8));
    o.detail += "; local arm " + std::to_string(b.arm_i) + ": ";
    Outcome ol;
    benchmark_lines(ol, b);
    o.pass = o.pass && ol.pass;
    o.detail += ol.detail;
    return o;
  });

  criterion(8, "identical arms", 300, [&] {
    Outcome o;
    Experiment e = clv_null_experiment();
    double hom = *sigma_is(e, 1, 0, kClvEvalState).hom;
    add(o, hom == 0.0, "closed-form hom(IS)=" + fmt("%.1e", hom));
    CampaignConfig c = config("AB,IS", 5000, 1000, seed + 9);
    c.arm_i = 1;
    CampaignResult res = run_campaign(e, c);
    double ab = res.row(EstimatorKind::AB).emp_sd, is = res.row(EstimatorKind::IS).emp_sd;
    double ratio = (is * is) / (ab * ab);
    add(o, ratio < 0.25, "var IS/AB=" + fmt("%.4f", ratio));
    return o;
  });

  criterion(9, "Difference-in-Q against Naive", 300, [&] {
    Outcome o;
    Experiment e = clv_experiment({ClvVariant::SST, ClvSchedule::Main, 2, 0.0});
    CampaignResult res = run_campaign(e, config("Naive,DQ,DQ-IS", 350, 1000, seed + 10));
    double bn = res.row(EstimatorKind::Naive).bias, bd = res.row(EstimatorKind::DQ).bias;
    add(o, std::abs(bd) <= std::abs(bn),
        "|bias| DQ=" + fmt("%.3f", std::abs(bd)) + " Naive=" + fmt("%.3f", std::abs(bn)));
    double sd = res.row(EstimatorKind::DQ).emp_sd, sdi = res.row(EstimatorKind::DQ_IS).emp_sd;
    add(o, sdi <= sd, "sd DQ-IS=" + fmt("%.3f", sdi) + " DQ=" + fmt("%.3f", sd));
    return o;
  });

  std::printf("%s: %d criterion failure(s)\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
