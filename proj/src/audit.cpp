#include "mdplab/audit.hpp"

#include "mdplab/ccrb.hpp"
#include "mdplab/estimators.hpp"
#include "mdplab/instances.hpp"
#include "mdplab/rng.hpp"
#include "mdplab/theory_checks.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <random>

namespace mdplab {

namespace {

struct Outcome {
  bool failed = false;
  double worst = 0.0;
};

// Per-instance outcomes are stored by index and reduced in order.
AuditLine fan_out(const std::string& name, int count, bool parallel, double tol,
                  const std::function<Outcome(int)>& fn) {
  std::vector<Outcome> out(count);
  if (parallel) {
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < count; ++k) {
      try {
        out[k] = fn(k);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
  } else {
    for (int k = 0; k < count; ++k) out[k] = fn(k);
  }
  AuditLine line{name, count, 0, 0.0, tol};
  for (const Outcome& o : out) {
    line.failed += o.failed ? 1 : 0;
    line.worst = std::max(line.worst, o.worst);
  }
  return line;
}

std::mt19937_64 instance_rng(std::uint64_t seed, int idx, std::uint64_t stream) {
  return std::mt19937_64(derive_seed(seed, static_cast<std::uint64_t>(idx), stream));
}

Outcome from_verdict(const ComparisonVerdict& v) {
  Outcome o;
  o.failed = !v.all_pass();
  for (const Check& c : v.checks) {
    double excess = c.relation == "==" ? std::abs(c.lhs - c.rhs) : c.lhs - c.rhs;
    if (c.relation == "<") excess = c.lhs - c.rhs;
    o.worst = std::max(o.worst, excess);
  }
  return o;
}

double frob(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

}  // namespace

SplitDatasets split_is_shares_crucial(const Trajectory& traj, const Experiment& exp) {
  const int n = exp.num_arms();
  SplitDatasets d{SplitRule::IS, std::vector<std::vector<Transition>>(n)};
  for (const Transition& x : traj.steps)
    for (int i = 0; i < n; ++i) d.per_arm[i].push_back(x);
  return d;
}

bool is_split_valid(const Trajectory& traj, const Experiment& exp, const SplitDatasets& d) {
  const int n = exp.num_arms();
  if (static_cast<int>(d.per_arm.size()) != n) return false;
  for (int i = 0; i < n; ++i) {
    std::size_t k = 0;
    const std::vector<Transition>& D = d.per_arm[i];
    for (const Transition& x : traj.steps) {
      bool belongs = !exp.crucial(x.s) || x.arm == i;
      if (!belongs) continue;
      if (k >= D.size()) return false;
      const Transition& y = D[k++];
      if (y.s != x.s || y.a != x.a || y.s_next != x.s_next || y.r != x.r || y.arm != x.arm) {
        return false;
      }
    }
    if (k != D.size()) return false;
  }
  return true;
}

bool AuditReport::pass() const {
  for (const AuditLine& l : lines)
    if (!l.pass()) return false;
  return true;
}

const AuditLine& AuditReport::line(const std::string& name) const {
  for (const AuditLine& l : lines)
    if (l.name == name) return l;
  throw std::out_of_range("no audit line " + name);
}

AuditReport run_audit(const AuditConfig& cfg) {
  AuditReport rep;
  const bool par = cfg.parallel;

  rep.lines.push_back(fan_out("mb-equals-td", cfg.trajectories, par, 1e-9, [&](int k) {
    std::mt19937_64 rng = instance_rng(cfg.seed, k, 1);
    std::uniform_int_distribution<int> uk(2, 6), ut(200, 2000);
    std::uniform_int_distribution<int> ug(0, 2);
    const double gammas[] = {0.5, 0.8, 0.95};
    for (;;) {
      MdpModel m = random_model(rng, uk(rng), 1, gammas[ug(rng)]);
      PolicyMatrix pi = PolicyMatrix::deterministic(1, std::vector<int>(m.num_states(), 0));
      Trajectory t = sample_trajectory(m, pi, ut(rng), std::nullopt, rng());
      EstimateReport mb = estimate_mb(t, m.gamma(), false);
      if (!mb.flags.empty()) continue;
      EstimateReport td = estimate_td(t, m.gamma());
      double d = (mb.point - td.point).lpNorm<Eigen::Infinity>();
      return Outcome{!(d < 1e-9), d};
    }
  }));

  for (int n : {2, 3, 4, 5}) {
    std::string name = "variance-order-sst-n" + std::to_string(n);
    rep.lines.push_back(fan_out(name, cfg.instances, par, 1e-9, [&, n](int k) {
      std::mt19937_64 rng = instance_rng(cfg.seed, k, 10 + n);
      InstanceOptions opt;
      opt.n_arms = n;
      return from_verdict(compare_variances(random_experiment(rng, opt)));
    }));
  }
  for (int n : {2, 3}) {
    std::string name = "variance-order-local-n" + std::to_string(n);
    rep.lines.push_back(fan_out(name, cfg.instances, par, 1e-9, [&, n](int k) {
      std::mt19937_64 rng = instance_rng(cfg.seed, k, 20 + n);
      InstanceOptions opt;
      opt.n_arms = n;
      opt.local = true;
      return from_verdict(compare_variances(random_experiment(rng, opt)));
    }));
  }

  rep.lines.push_back(fan_out("equality-conditions", cfg.instances, par, 1e-9, [&](int k) {
    std::mt19937_64 rng = instance_rng(cfg.seed, k, 30);
    EqualityDiagnostics d = equality_diagnostics(random_experiment(rng, {}));
    return Outcome{!d.consistent(), 0.0};
  }));

  rep.lines.push_back(fan_out("monotonicity", cfg.instances, par, 1e-9, [&](int k) {
    std::mt19937_64 rng = instance_rng(cfg.seed, k, 31);
    InstanceOptions opt;
    opt.n_arms = 3;
    Outcome o;
    for (const MonotonicityResult& m : monotonicity_check(random_experiment(rng, opt))) {
      o.failed = o.failed || !m.pass || !m.strict;
      o.worst = std::max({o.worst, -m.worst_sign, m.worst_bound});
    }
    return o;
  }));

  rep.lines.push_back(fan_out("performance-difference", cfg.instances, par, 1e-9, [&](int k) {
    std::mt19937_64 rng = instance_rng(cfg.seed, k, 32);
    InstanceOptions opt;
    opt.n_arms = 3;
    Outcome o;
    for (const PdlResult& p : pdl_check(random_experiment(rng, opt))) {
      double w = std::max(p.residual_treatment, p.residual_control);
      o.worst = std::max(o.worst, w);
      o.failed = o.failed || !(w <= 1e-9);
    }
    return o;
  }));

  rep.lines.push_back(fan_out("stationary-perturbation", cfg.instances, par, 1e-9, [&](int k) {
    std::mt19937_64 rng = instance_rng(cfg.seed, k, 33);
    Experiment e = random_experiment(rng, {});
    GroupInverseResiduals g = group_inverse_residuals(e.arm_chain(0).P);
    double w = std::max({g.first, g.second, g.commute,
                         stationary_perturbation_residual(e.arm_chain(0).P, e.arm_chain(1).P)});
    return Outcome{!(w <= 1e-9), w};
  }));

  auto ccrb_line = [&](const std::string& name, std::uint64_t stream, auto fn) {
    rep.lines.push_back(fan_out(name, cfg.ccrb_instances, par, 1e-7, [&, stream, fn](int k) {
      std::mt19937_64 rng = instance_rng(cfg.seed, k, stream);
      Experiment e = random_experiment(rng, {});
      double d = fn(e);
      return Outcome{!(d < 1e-7), d};
    }));
  };
  ccrb_line("ccrb-value", 40, [](const Experiment& e) {
    const PolicyMatrix& pi = e.arm_policy(0);
    return frob(ccrb_value(e.model(), pi).matrix, sigma_mb(e.model(), pi, 0).full);
  });
  ccrb_line("ccrb-ab", 41, [](const Experiment& e) {
    return frob(ccrb_ate(e, 1, 0).matrix, sigma_ab(e, 1, 0, 0).full);
  });
  ccrb_line("ccrb-is", 42, [](const Experiment& e) {
    return frob(ccrb_ate_shared(e, 1, 0).matrix, sigma_is(e, 1, 0, 0).full);
  });

  rep.lines.push_back(fan_out("is-sharing-invariant", cfg.instances, par, 0.0, [&](int k) {
    std::mt19937_64 rng = instance_rng(cfg.seed, k, 50);
    InstanceOptions opt;
    opt.n_arms = 3;
    Experiment e = random_experiment(rng, opt);
    Trajectory t = sample_experiment(e, e.uniform_weights(), 200, std::nullopt, rng());
    return Outcome{!is_split_valid(t, e, cfg.is_split(t, e)), 0.0};
  }));
  return rep;
}

}  // namespace mdplab
