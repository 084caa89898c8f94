#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "rhoflow/bayes.hpp"
#include "rhoflow/copula.hpp"
#include "rhoflow/flow.hpp"
#include "rhoflow/rng.hpp"
#include "rhoflow/simgen.hpp"

namespace rhoflow::checks {

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

/// Identity-initialized model with all parameters jittered; a generic smooth
/// monotone flow.
inline RhoGnfModel random_flow(std::uint64_t seed, double rho, double scale = 0.4) {
  RhoGnfModel model(CopulaCorrelation(rho), VariableKind::continuous(),
                    VariableKind::continuous(), {6, 5}, seed);
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> p(model.parameters().begin(), model.parameters().end());
  for (auto& v : p) v += n(rng);
  model.set_parameters(p);
  model.set_standardizers({0.3, 1.4}, {-0.2, 0.8});
  return model;
}

/// Random (rho, gamma, delta) with rho != 0 and delta inside its bound.
inline EquivScmSpec random_equiv_spec(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double rho = 0.0;
  while (std::abs(rho) < 0.05) rho = -0.95 + 1.9 * u(rng);
  const double gamma = (u(rng) < 0.5 ? -1.0 : 1.0) * (0.2 + 1.8 * u(rng));
  const double bound = std::sqrt((1.0 - rho * rho) * gamma * gamma / (rho * rho));
  const double delta = (2.0 * u(rng) - 1.0) * std::min(bound, 5.0);
  return equiv_scm_params(rho, gamma, delta);
}

struct LatentMoments {
  double mean_a = 0.0;
  double mean_y = 0.0;
  double var_a = 0.0;
  double var_y = 0.0;
  double corr = 0.0;
};

inline LatentMoments latent_moments(std::span<const GaussianPair> z) {
  LatentMoments m;
  const double n = static_cast<double>(z.size());
  for (const auto& p : z) {
    m.mean_a += p.z_a;
    m.mean_y += p.z_y;
  }
  m.mean_a /= n;
  m.mean_y /= n;
  double cov = 0.0;
  for (const auto& p : z) {
    m.var_a += (p.z_a - m.mean_a) * (p.z_a - m.mean_a);
    m.var_y += (p.z_y - m.mean_y) * (p.z_y - m.mean_y);
    cov += (p.z_a - m.mean_a) * (p.z_y - m.mean_y);
  }
  m.var_a /= n;
  m.var_y /= n;
  m.corr = cov / n / std::sqrt(m.var_a * m.var_y);
  return m;
}

struct EquivCheck {
  LatentMoments moments;
  double ks_a = 0.0;
  double ks_y = 0.0;
};

/// Samples the equivalent SCM through a random flow, maps (A, Y) back to the
/// latent space with the flow, and compares (A, Y) with direct sampling of the
/// flow from its correlated base distribution.
inline EquivCheck check_equivalence(const EquivScmSpec& spec, std::uint64_t seed, std::size_t n) {
  const auto model = random_flow(seed, spec.rho);
  const auto s = sample_equiv_scm(spec, model, n, seed + 1);
  std::vector<GaussianPair> z;
  z.reserve(n);
  for (const auto& p : forward_batch(model, s.a, s.y)) z.push_back(p.z);

  const auto base = sample_bivariate(CopulaCorrelation(spec.rho), n, seed + 2);
  std::vector<double> a(n);
  std::vector<double> y(n);
  const auto t_a = model.treatment_spline();
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = model.a_standardizer().invert(t_a.inverse(base[i].z_a));
  }
  const auto splines = model.outcome_splines(a);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = model.y_standardizer().invert(splines[i].inverse(base[i].z_y));
  }
  return {latent_moments(z), ks_statistic(s.a, a), ks_statistic(s.y, y)};
}

struct SignCheck {
  std::size_t points = 0;
  std::size_t mismatches = 0;
};

/// Central finite differences of A and of Y (at fixed A) with respect to U,
/// holding the other noises fixed.
inline SignCheck check_influence_signs(const EquivScmSpec& spec, std::uint64_t seed,
                                       std::size_t points, double h = 1e-4) {
  const auto model = random_flow(seed, spec.rho);
  const auto expected = influence_signs(spec);
  NormalSource normal(seed + 3);
  SignCheck out;
  for (std::size_t i = 0; i < points; ++i) {
    const double u = normal();
    const double eps_a = normal();
    const double eps_y = normal();
    const double da = equiv_treatment(spec, model, u + h, eps_a) -
                      equiv_treatment(spec, model, u - h, eps_a);
    const double a = equiv_treatment(spec, model, u, eps_a);
    const double dy = equiv_outcome(spec, model, u + h, a, eps_y) -
                      equiv_outcome(spec, model, u - h, a, eps_y);
    const int sa = da > 0.0 ? 1 : (da < 0.0 ? -1 : 0);
    const int sy = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);
    ++out.points;
    if (sa != expected.on_treatment || sy != expected.on_outcome) ++out.mismatches;
  }
  return out;
}

// Kernel checks shared by the unit tests and the acceptance run. Each returns
// the worst discrepancy found.

inline double worst_inverse_error(std::size_t models, std::size_t points) {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < models; ++s) {
    const auto model = random_flow(s, 0.6, 0.6);
    std::mt19937_64 rng(s + 7);
    std::normal_distribution<double> d(0.0, 3.0);
    for (std::size_t i = 0; i < points; ++i) {
      const double a = d(rng);
      const double y = d(rng);
      const auto back = inverse(model, forward(model, a, y), a);
      worst = std::max({worst, std::abs(back.a - a), std::abs(back.y - y)});
    }
  }
  return worst;
}

/// Largest |fd - analytic| / max(1, |fd|) over every parameter of `models`
/// random flows, central differences with step 1e-4.
inline double worst_gradient_error(std::size_t models, double roughness = 0.0) {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < models; ++s) {
    auto model = random_flow(100 + s, -0.9 + 1.8 * static_cast<double>(s) / static_cast<double>(models));
    std::mt19937_64 rng(200 + s);
    std::normal_distribution<double> d(0.0, 2.0);
    std::vector<double> a(16);
    std::vector<double> y(16);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = d(rng);
      y[i] = d(rng);
    }
    std::vector<double> grad(model.parameter_count());
    log_likelihood_gradient(model, a, y, grad, roughness);
    auto objective = [&](const RhoGnfModel& m) {
      double r = m.treatment_spline().roughness() * static_cast<double>(a.size());
      for (double v : a) r += m.outcome_spline(v).roughness();
      return log_likelihood(m, a, y) - roughness * r;
    };
    std::vector<double> p(model.parameters().begin(), model.parameters().end());
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double orig = p[i];
      p[i] = orig + 1e-4;
      model.set_parameters(p);
      const double f1 = objective(model);
      p[i] = orig - 1e-4;
      model.set_parameters(p);
      const double f0 = objective(model);
      p[i] = orig;
      model.set_parameters(p);
      const double fd = (f1 - f0) / 2e-4;
      worst = std::max(worst, std::abs(fd - grad[i]) / std::max(1.0, std::abs(fd)));
    }
  }
  return worst;
}

/// |joint log-likelihood at rho = 0 - sum of the two marginal flow
/// log-likelihoods|.
inline double worst_factorization_error(std::size_t models, std::size_t points) {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < models; ++s) {
    const auto model = random_flow(s, 0.0);
    std::mt19937_64 rng(s);
    std::normal_distribution<double> d(0.0, 2.0);
    std::vector<double> a(points);
    std::vector<double> y(points);
    for (std::size_t i = 0; i < points; ++i) {
      a[i] = d(rng);
      y[i] = d(rng);
    }
    const auto t_a = model.treatment_spline();
    const auto& sa = model.a_standardizer();
    const auto& sy = model.y_standardizer();
    double ll_a = 0.0;
    double ll_y = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
      const auto ea = t_a.evaluate(sa.apply(a[i]));
      ll_a += std_normal_logpdf(ea.value) + ea.log_derivative - std::log(sa.scale);
      const auto ey = model.outcome_spline(a[i]).evaluate(sy.apply(y[i]));
      ll_y += std_normal_logpdf(ey.value) + ey.log_derivative - std::log(sy.scale);
    }
    worst = std::max(worst, std::abs(log_likelihood(model, a, y) - (ll_a + ll_y)));
  }
  return worst;
}

/// Beta prior CDF against tanh-sinh integration of its density.
inline double worst_beta_cdf_error() {
  boost::math::quadrature::tanh_sinh<double> quad;
  double worst = 0.0;
  for (auto [a, b] : {std::pair{2.0, 2.0}, {0.7, 3.2}, {5.0, 1.5}, {1.2, 0.9}, {0.5, 0.5}}) {
    const auto prior = RhoPrior::beta(a, b);
    const double norm = std::beta(a, b);
    // Integrate on t = (rho+1)/2 so the singular endpoint sits exactly at 0.
    auto density = [&](double t) { return std::pow(t, a - 1) * std::pow(1 - t, b - 1) / norm; };
    for (int k = -19; k <= 19; ++k) {
      const double r = k / 20.0;
      const double integral = quad.integrate(density, 0.0, 0.5 * (r + 1.0));
      worst = std::max(worst, std::abs(integral - prior_cdf(prior, r)));
    }
  }
  return worst;
}

/// |sum of discretized prior mass - 1| over random grids and all families.
inline double worst_discretization_mass(std::size_t grids, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(2, 60);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<RhoPrior> priors{RhoPrior::uniform(), RhoPrior::beta(2.5, 0.8),
                                     RhoPrior::truncated_normal(0.4, 0.3)};
  double worst = 0.0;
  for (std::size_t g = 0; g < grids; ++g) {
    std::vector<double> grid(static_cast<std::size_t>(count(rng)));
    for (auto& v : grid) v = u(rng);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.size() < 2) continue;
    for (const auto& prior : priors) {
      const auto pmf = discretize_prior(prior, grid);
      for (double m : pmf) {
        if (m < 0.0) return INFINITY;
      }
      worst = std::max(worst, std::abs(std::accumulate(pmf.begin(), pmf.end(), 0.0) - 1.0));
    }
  }
  return worst;
}

}  // namespace rhoflow::checks
