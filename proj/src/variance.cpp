#include "mdplab/variance.hpp"

namespace mdplab {

namespace {

double local_quad(const Vector& p, const Vector& v) {
  return v.dot(multinomial_cov(p) * v);
}

void check_pair(const DesignTerms& d, int i, int j) {
  if (i < 0 || j < 0 || i >= d.n || j >= d.n) throw ModelError("arm index out of range");
}

}  // namespace

ArmTerms arm_terms(const Matrix& P, const Vector& r, const Vector& sigma_sq, double gamma) {
  ArmTerms t;
  t.P = P;
  t.r = r;
  t.sigma_sq = sigma_sq;
  t.M = resolvent(P, gamma);
  t.V = t.M * r;
  const Vector gV = gamma * t.V;
  t.w.resize(P.rows());
  for (int s = 0; s < P.rows(); ++s) {
    t.w(s) = sigma_sq(s) + local_quad(P.row(s).transpose(), gV);
  }
  return t;
}

const char* design_name(Design d) {
  switch (d) {
    case Design::AB: return "AB";
    case Design::IS: return "IS";
    case Design::PI: return "PI";
  }
  return "?";
}

DesignTerms design_terms(const Experiment& exp) {
  DesignTerms d;
  d.gamma = exp.gamma();
  d.n = exp.num_arms();
  d.crucial = exp.crucial_mask();
  for (int i = 0; i < d.n; ++i) {
    const InducedChain& c = exp.arm_chain(i);
    d.arms.push_back(arm_terms(c.P, c.r, c.sigma_sq, d.gamma));
  }
  d.mu = stationary_distribution(exp.model(), exp.mixed_policy(exp.uniform_weights()));
  if (d.n >= 2) {
    d.mu_pi = stationary_distribution(exp.model(), exp.mixed_policy(exp.treatment_weights()));
  }
  return d;
}

PairCovariance pair_covariance(const DesignTerms& d, Design design, int i, int j) {
  check_pair(d, i, j);
  const int K = static_cast<int>(d.mu.size());
  PairCovariance out{Matrix::Zero(K, K), Matrix::Zero(K, K)};
  if (i == j) return out;
  const ArmTerms& ai = d.arms[i];
  const ArmTerms& aj = d.arms[j];
  const double n = d.n;

  Vector t_mask(K), c_mask(K);
  for (int s = 0; s < K; ++s) {
    t_mask(s) = d.crucial[s] ? 1.0 : 0.0;
    c_mask(s) = 1.0 - t_mask(s);
  }

  if (design == Design::PI) {
    auto weights = [&](const ArmTerms& a) {
      Vector D = Vector::Zero(K);
      for (int s = 0; s < K; ++s)
        if (d.crucial[s]) D(s) = (n - 1.0) * a.w(s) / d.mu_pi(s);
      return D;
    };
    if (i != 0) out.het += ai.M * weights(ai).asDiagonal() * ai.M.transpose();
    if (j != 0) out.het += aj.M * weights(aj).asDiagonal() * aj.M.transpose();
    return out;
  }

  const Vector inv_mu = d.mu.cwiseInverse();
  const Vector Di = n * ai.w.cwiseProduct(inv_mu);
  const Vector Dj = n * aj.w.cwiseProduct(inv_mu);
  out.het = ai.M * t_mask.cwiseProduct(Di).asDiagonal() * ai.M.transpose() +
            aj.M * t_mask.cwiseProduct(Dj).asDiagonal() * aj.M.transpose();
  if (design == Design::AB) {
    out.hom = ai.M * c_mask.cwiseProduct(Di).asDiagonal() * ai.M.transpose() +
              aj.M * c_mask.cwiseProduct(Dj).asDiagonal() * aj.M.transpose();
    return out;
  }

  const ArmTerms& c = d.arms[0];
  for (int s = 0; s < K; ++s) {
    if (d.crucial[s]) continue;
    const Vector rho_i = ai.M.col(s);
    const Vector rho_j = aj.M.col(s);
    const Matrix B = d.gamma * (rho_i * ai.V.transpose() - rho_j * aj.V.transpose());
    const Vector dr = rho_i - rho_j;
    out.hom += inv_mu(s) * (B * multinomial_cov(c.P.row(s).transpose()) * B.transpose() +
                            c.sigma_sq(s) * dr * dr.transpose());
  }
  return out;
}

ScalarVariance pair_variance_at(const DesignTerms& d, Design design, int i, int j, int x) {
  check_pair(d, i, j);
  ScalarVariance v;
  if (i == j) return v;
  const int K = static_cast<int>(d.mu.size());
  const ArmTerms& ai = d.arms[i];
  const ArmTerms& aj = d.arms[j];
  const double n = d.n;
  const double g = d.gamma;
  for (int s = 0; s < K; ++s) {
    const double ri = ai.M(x, s);
    const double rj = aj.M(x, s);
    if (design == Design::PI) {
      if (!d.crucial[s]) continue;
      double term = 0.0;
      if (i != 0) term += ri * ri * ai.w(s);
      if (j != 0) term += rj * rj * aj.w(s);
      v.het += (n - 1.0) * term / d.mu_pi(s);
      continue;
    }
    const double ab = n * (ri * ri * ai.w(s) + rj * rj * aj.w(s)) / d.mu(s);
    if (d.crucial[s]) {
      v.het += ab;
    } else if (design == Design::AB) {
      v.hom += ab;
    } else {
      const ArmTerms& c = d.arms[0];
      const Vector u = g * ri * ai.V - g * rj * aj.V;
      v.hom += ((ri - rj) * (ri - rj) * c.sigma_sq(s) +
                local_quad(c.P.row(s).transpose(), u)) / d.mu(s);
    }
  }
  return v;
}

Matrix value_covariance(const ArmTerms& arm, const Vector& mu) {
  return arm.M * arm.w.cwiseQuotient(mu).asDiagonal() * arm.M.transpose();
}

double value_variance_at(const ArmTerms& arm, const Vector& mu, int x) {
  double v = 0.0;
  for (int s = 0; s < mu.size(); ++s) v += arm.M(x, s) * arm.M(x, s) * arm.w(s) / mu(s);
  return v;
}

namespace {

VarianceReport value_report(const std::string& name, const MdpModel& model,
                            const PolicyMatrix& policy, int state, bool markov) {
  if (state < 0 || state >= model.num_states()) throw ModelError("state out of range");
  InducedChain c = induce_chain(model, policy);
  ArmTerms t = arm_terms(c.P, c.r, c.sigma_sq, model.gamma());
  Vector mu = stationary_distribution(c.P);
  VarianceReport rep;
  rep.estimator = name;
  rep.state = state;
  rep.mu = mu;
  rep.rho = {t.M.row(state).transpose()};
  rep.values = {t.V};
  if (markov) {
    rep.full = value_covariance(t, mu);
    rep.at_state = value_variance_at(t, mu, state);
  } else {
    rep.full = t.M * t.w.asDiagonal() * t.M.transpose();
    double v = 0.0;
    for (int s = 0; s < mu.size(); ++s) v += t.M(state, s) * t.M(state, s) * t.w(s);
    rep.at_state = v;
  }
  return rep;
}

}  // namespace

VarianceReport sigma_mb(const MdpModel& model, const PolicyMatrix& policy, int state) {
  return value_report("MB", model, policy, state, true);
}

VarianceReport sigma_gm(const MdpModel& model, const PolicyMatrix& policy, int state) {
  return value_report("GM", model, policy, state, false);
}

VarianceReport sigma_design(const Experiment& exp, Design design, int i, int j, int state) {
  if (exp.num_arms() < 2) throw ModelError("variance of an ATE needs at least two arms");
  if (state < 0 || state >= exp.num_states()) throw ModelError("state out of range");
  DesignTerms d = design_terms(exp);
  PairCovariance cov = pair_covariance(d, design, i, j);
  ScalarVariance sv = pair_variance_at(d, design, i, j, state);
  VarianceReport rep;
  rep.estimator = design_name(design);
  rep.state = state;
  rep.arm_i = i;
  rep.arm_j = j;
  rep.full = cov.full();
  rep.at_state = sv.total();
  rep.het = sv.het;
  rep.hom = sv.hom;
  rep.mu = design == Design::PI ? d.mu_pi : d.mu;
  rep.rho = {d.arms[i].M.row(state).transpose(), d.arms[j].M.row(state).transpose()};
  rep.values = {d.arms[i].V, d.arms[j].V};
  return rep;
}

VarianceReport sigma_ab(const Experiment& exp, int i, int j, int state) {
  return sigma_design(exp, Design::AB, i, j, state);
}

VarianceReport sigma_is(const Experiment& exp, int i, int j, int state) {
  return sigma_design(exp, Design::IS, i, j, state);
}

VarianceReport sigma_pi(const Experiment& exp, int i, int j, int state) {
  return sigma_design(exp, Design::PI, i, j, state);
}

VarianceReport sigma_local(const Experiment& exp, Design design, int i, int j, int state) {
  return sigma_design(exp, design, i, j, state);
}

}  // namespace mdplab
