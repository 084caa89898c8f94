#include "rhoflow/simgen.hpp"

#include <cmath>
#include <sstream>

#include "rhoflow/errors.hpp"
#include "rhoflow/rng.hpp"

namespace rhoflow {

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << what << " must be a probability, got " << p;
    throw DomainError(os.str());
  }
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

void LinearScmSpec::validate() const {
  if (!(delta > 0.0)) throw DomainError("outcome-noise variance delta must be positive");
  if (beta * beta > delta) {
    throw DomainError("noise covariance is not positive semi-definite (beta^2 > delta)");
  }
}

LinearScmSpec table1_scm(int index) {
  switch (index) {
    case 1: return {0.2, -0.6, 0.72};
    case 2: return {0.0, -0.4, 0.52};
    case 3: return {-0.2, -0.2, 0.40};
    case 4: return {0.2, 0.2, 0.40};
    case 5: return {0.0, 0.4, 0.52};
    case 6: return {-0.2, 0.6, 0.72};
    default: throw DomainError("reference SCM index must be in 1..6");
  }
}

LinearScmStats linear_scm_stats(const LinearScmSpec& spec) {
  spec.validate();
  const double var_y = spec.alpha * spec.alpha + spec.delta + 2.0 * spec.alpha * spec.beta;
  const double cov_ay = spec.alpha + spec.beta;
  return {cov_ay / std::sqrt(var_y), spec.beta / std::sqrt(spec.delta), spec.alpha};
}

ObservationalDataset sample_linear_scm(const LinearScmSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw DomainError("sample size must be positive");
  NormalSource normal(seed);
  const double resid = std::sqrt(spec.delta - spec.beta * spec.beta);
  ObservationalDataset d;
  d.a.resize(n);
  d.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e_a = normal();
    const double e_y = spec.beta * e_a + resid * normal();
    d.a[i] = e_a;
    d.y[i] = spec.alpha * e_a + e_y;
  }
  return d;
}

void BinaryScmSpec::validate() const {
  check_probability(p_u, "P(U=1)");
  for (double p : p_a_given_u) check_probability(p, "P(A=1|U)");
  for (double p : p_y_given_a_u) check_probability(p, "P(Y=1|A,U)");
}

BinaryScmSpec random_binary_scm(std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  BinaryScmSpec s;
  s.p_u = unit(rng);
  for (double& p : s.p_a_given_u) p = unit(rng);
  for (double& p : s.p_y_given_a_u) p = unit(rng);
  return s;
}

BinaryScmSpec binary_suite_scm(std::uint64_t master_seed, std::size_t index) {
  return random_binary_scm(mix_seed(master_seed, index));
}

double binary_scm_ace(const BinaryScmSpec& spec) {
  spec.validate();
  const double pu[2] = {1.0 - spec.p_u, spec.p_u};
  double ace = 0.0;
  for (int u = 0; u < 2; ++u) {
    ace += (spec.p_y_given_a_u[2 + u] - spec.p_y_given_a_u[u]) * pu[u];
  }
  return ace;
}

BinaryScmSample sample_binary_scm(const BinaryScmSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw DomainError("sample size must be positive");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  BinaryScmSample out;
  auto& d = out.dataset;
  d.a_kind = VariableKind::binary();
  d.y_kind = VariableKind::binary();
  d.a.resize(n);
  d.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int u = unit(rng) < spec.p_u ? 1 : 0;
    const int a = unit(rng) < spec.p_a_given_u[u] ? 1 : 0;
    const int y = unit(rng) < spec.p_y_given_a_u[2 * a + u] ? 1 : 0;
    d.a[i] = a;
    d.y[i] = y;
  }
  out.ace_true = binary_scm_ace(spec);
  return out;
}

EquivScmSpec equiv_scm_params(double rho, double gamma, double delta) {
  if (!(std::abs(rho) < 1.0)) throw DomainError("equivalent SCM requires |rho| < 1");
  if (gamma == 0.0) throw DomainError("gamma must be non-zero");
  const double r2 = rho * rho;
  if (rho != 0.0) {
    const double bound = std::sqrt((1.0 - r2) * gamma * gamma / r2);
    if (std::abs(delta) > bound) {
      std::ostringstream os;
      os << "delta needs to be bounded by +/-" << bound << " for rho=" << rho
         << " and gamma=" << gamma << ", got " << delta;
      throw DomainError(os.str());
    }
  }
  EquivScmSpec s;
  s.rho = rho;
  s.gamma = gamma;
  s.delta = delta;
  const double ratio = (gamma * gamma + delta * delta) / (gamma * gamma);
  s.lambda = std::sqrt(gamma * gamma + delta * delta) / gamma;
  // At the delta bound the radicand is zero up to rounding.
  s.tau = std::sqrt(std::max(0.0, 1.0 / (1.0 - r2) - ratio * r2 / (1.0 - r2)));
  return s;
}

GaussianPair equiv_latent(const EquivScmSpec& s, double u, double eps_a, double eps_y) {
  const double norm = std::sqrt(s.gamma * s.gamma + s.delta * s.delta);
  return {(s.gamma * u + s.delta * eps_a) / norm,
          s.lambda * s.rho * u + s.tau * std::sqrt(1.0 - s.rho * s.rho) * eps_y};
}

double equiv_treatment(const EquivScmSpec& s, const RhoGnfModel& model, double u, double eps_a) {
  const double z_a = equiv_latent(s, u, eps_a, 0.0).z_a;
  return model.a_standardizer().invert(model.treatment_spline().inverse(z_a));
}

double equiv_outcome(const EquivScmSpec& s, const RhoGnfModel& model, double u, double a,
                     double eps_y) {
  const double z_y = equiv_latent(s, u, 0.0, eps_y).z_y;
  return model.y_standardizer().invert(model.outcome_spline(a).inverse(z_y));
}

EquivScmSample sample_equiv_scm(const EquivScmSpec& spec, const RhoGnfModel& model, std::size_t n,
                                std::uint64_t seed) {
  NormalSource normal(seed);
  EquivScmSample out;
  out.u.resize(n);
  out.a.resize(n);
  out.y.resize(n);
  std::vector<double> z_y(n);
  const auto t_a = model.treatment_spline();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = normal();
    const double eps_a = normal();
    const double eps_y = normal();
    const auto z = equiv_latent(spec, u, eps_a, eps_y);
    out.u[i] = u;
    out.a[i] = model.a_standardizer().invert(t_a.inverse(z.z_a));
    z_y[i] = z.z_y;
  }
  const auto splines = model.outcome_splines(out.a);
  for (std::size_t i = 0; i < n; ++i) {
    out.y[i] = model.y_standardizer().invert(splines[i].inverse(z_y[i]));
  }
  return out;
}

InfluenceSigns influence_signs(const EquivScmSpec& spec) {
  if (spec.rho == 0.0) throw DomainError("influence sign on the outcome is undefined at rho = 0");
  return {static_cast<int>(sign(spec.gamma)), static_cast<int>(sign(spec.rho) * sign(spec.gamma))};
}

}  // namespace rhoflow
