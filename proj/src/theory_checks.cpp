#include "mdplab/theory_checks.hpp"

#include <cmath>
#include <sstream>

namespace mdplab {

namespace {

std::string tag(const char* what, int i, int j, int x) {
  std::ostringstream os;
  os << what << " pair(" << i << "," << j << ") s=" << x;
  return os.str();
}

double scale(double v) { return std::max(1.0, std::abs(v)); }

Check eq(std::string name, double a, double b, double tol) {
  return {std::move(name), a, b, "==", std::abs(a - b) <= tol * scale(b)};
}

Check le(std::string name, double a, double b, double tol) {
  return {std::move(name), a, b, "<=", a <= b + tol * scale(b)};
}

Check lt(std::string name, double a, double b) { return {std::move(name), a, b, "<", a < b}; }

void require_single(const Experiment& exp) {
  if (!exp.spec().single_state()) throw ModelError("check requires a single crucial state");
}

}  // namespace

bool ComparisonVerdict::all_pass() const { return failures() == 0; }

int ComparisonVerdict::failures() const {
  int f = 0;
  for (const Check& c : checks) f += c.pass ? 0 : 1;
  return f;
}

ComparisonVerdict compare_variances(const Experiment& exp, double tol) {
  if (exp.num_arms() < 2) throw ModelError("comparison needs at least two arms");
  DesignTerms d = design_terms(exp);
  const int n = exp.num_arms();
  const bool sst = exp.spec().single_state();
  std::vector<int> states;
  if (sst) {
    states = exp.spec().crucial_states();
  } else {
    for (int s = 0; s < exp.num_states(); ++s) states.push_back(s);
  }
  ComparisonVerdict v;
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      for (int x : states) {
        ScalarVariance ab = pair_variance_at(d, Design::AB, i, j, x);
        ScalarVariance is = pair_variance_at(d, Design::IS, i, j, x);
        ScalarVariance pi = pair_variance_at(d, Design::PI, i, j, x);
        v.checks.push_back(eq(tag("het(IS)==het(AB)", i, j, x), is.het, ab.het, tol));
        v.checks.push_back(le(tag("hom(IS)<=(2/n)hom(AB)", i, j, x), is.hom,
                              (2.0 / n) * ab.hom, tol));
        v.checks.push_back({tag("hom(PI)==0", i, j, x), pi.hom, 0.0, "==", pi.hom == 0.0});
        v.checks.push_back(le(tag("0<=hom(IS)", i, j, x), 0.0, is.hom, tol));
        if (sst) v.checks.push_back(lt(tag("het(PI)<het(AB)", i, j, x), pi.het, ab.het));
      }
    }
  }
  return v;
}

EqualityDiagnostics equality_diagnostics(const Experiment& exp, double tol) {
  require_single(exp);
  if (exp.num_arms() != 2) throw ModelError("equality diagnostics need exactly two arms");
  DesignTerms d = design_terms(exp);
  const int x = exp.spec().crucial_states()[0];
  const int K = exp.num_states();
  EqualityDiagnostics out;
  ScalarVariance ab = pair_variance_at(d, Design::AB, 1, 0, x);
  ScalarVariance is = pair_variance_at(d, Design::IS, 1, 0, x);
  out.hom_ab = ab.hom;
  out.hom_is = is.hom;
  out.hom_equal = std::abs(ab.hom - is.hom) <= tol * scale(ab.hom);

  out.zero_noise_off_crucial = true;
  for (int s = 0; s < K; ++s)
    if (s != x && d.arms[0].sigma_sq(s) != 0.0) out.zero_noise_off_crucial = false;

  Vector rt(K - 1), rc(K - 1);
  for (int s = 0, k = 0; s < K; ++s) {
    if (s == x) continue;
    rt(k) = d.arms[1].M(x, s);
    rc(k) = d.arms[0].M(x, s);
    ++k;
  }
  double denom = rc.squaredNorm();
  out.kappa = denom > 0.0 ? rt.dot(rc) / denom : 0.0;
  out.rho_proportional =
      (rt - out.kappa * rc).lpNorm<Eigen::Infinity>() <= tol * scale(rt.lpNorm<Eigen::Infinity>());
  return out;
}

std::vector<MonotonicityResult> monotonicity_check(const Experiment& exp, double tol) {
  require_single(exp);
  const int x = exp.spec().crucial_states()[0];
  const double g = exp.gamma();
  std::vector<MonotonicityResult> out;
  for (int i = 1; i < exp.num_arms(); ++i) {
    Vector delta = true_ate(exp, i, 0);
    MonotonicityResult m;
    m.arm = i;
    m.delta_crucial = delta(x);
    const double sgn = delta(x) >= 0.0 ? 1.0 : -1.0;
    const double bound = g * std::abs(delta(x));
    const double t = tol * scale(delta(x));
    m.worst_sign = 0.0;
    m.worst_bound = -bound;
    for (int s = 0; s < exp.num_states(); ++s) {
      if (s == x) continue;
      double ds = sgn * delta(s);
      m.worst_sign = std::min(m.worst_sign, ds);
      m.worst_bound = std::max(m.worst_bound, ds - bound);
      if (!(ds < bound)) m.strict = false;
    }
    m.pass = m.worst_sign >= -t && m.worst_bound <= t;
    out.push_back(m);
  }
  return out;
}

std::vector<PdlResult> pdl_check(const Experiment& exp) {
  const MdpModel& model = exp.model();
  const Vector& Vc = exp.arm_value(0);
  const Matrix Qc = q_values(model, Vc);
  const Matrix Mc = resolvent(exp.arm_chain(0).P, exp.gamma());
  std::vector<PdlResult> out;
  for (int i = 1; i < exp.num_arms(); ++i) {
    const Vector& Vt = exp.arm_value(i);
    const Matrix Qt = q_values(model, Vt);
    const Matrix Mt = resolvent(exp.arm_chain(i).P, exp.gamma());
    const Vector delta = Vt - Vc;
    Vector via_t = Vector::Zero(exp.num_states());
    Vector via_c = Vector::Zero(exp.num_states());
    for (int s : exp.spec().crucial_states()) {
      via_t += Mt.col(s) * (Qc(s, i) - Vc(s));
      via_c -= Mc.col(s) * (Qt(s, 0) - Vt(s));
    }
    out.push_back({i, (delta - via_t).lpNorm<Eigen::Infinity>(),
                   (delta - via_c).lpNorm<Eigen::Infinity>()});
  }
  return out;
}

GroupInverseResiduals group_inverse_residuals(const Matrix& P) {
  const int K = static_cast<int>(P.rows());
  Matrix A = Matrix::Identity(K, K) - P;
  Matrix G = group_inverse(P);
  return {(A * G * A - A).lpNorm<Eigen::Infinity>(), (G * A * G - G).lpNorm<Eigen::Infinity>(),
          (A * G - G * A).lpNorm<Eigen::Infinity>()};
}

double stationary_perturbation_residual(const Matrix& P0, const Matrix& P1) {
  Vector mu0 = stationary_distribution(P0);
  Vector mu1 = stationary_distribution(P1);
  Matrix G0 = group_inverse(P0);
  Vector rhs = mu0 + ((P1 - P0) * G0).transpose() * mu1;
  return (mu1 - rhs).lpNorm<Eigen::Infinity>();
}

}  // namespace mdplab
