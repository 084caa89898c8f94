#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rhoflow {

/// Prior over the copula correlation, supported on [-1, 1].
class RhoPrior {
 public:
  enum class Family { uniform, beta, truncated_normal };

  static RhoPrior uniform();
  /// Density 0.5 * f_Beta((rho + 1) / 2; alpha, beta).
  static RhoPrior beta(double alpha, double beta);
  /// Normal(mu, sigma) restricted to [-1, 1].
  static RhoPrior truncated_normal(double mu, double sigma);
  /// Parses "uniform", "beta:ALPHA,BETA" or "truncnorm:MU,SIGMA".
  static RhoPrior parse(std::string_view spec);

  Family family() const noexcept { return family_; }
  double first() const noexcept { return p1_; }
  double second() const noexcept { return p2_; }
  /// Canonical spelling accepted by parse.
  std::string to_string() const;

  double density(double rho) const;

 private:
  RhoPrior(Family family, double p1, double p2) : family_(family), p1_(p1), p2_(p2) {}

  Family family_;
  double p1_;
  double p2_;
};

/// F_rho(rho). Throws DomainError outside [-1, 1].
double prior_cdf(const RhoPrior& prior, double rho);

/// Prior mass of each grid point: the CDF between midpoints of neighbours.
/// Throws DomainError unless the grid is strictly increasing within [-1, 1]
/// with at least two points.
std::vector<double> discretize_prior(const RhoPrior& prior, std::span<const double> grid);

/// A causal quantity evaluated at every grid value of rho.
struct GridEvaluation {
  std::vector<double> grid;
  std::vector<double> q_values;

  void validate() const;
};

struct DiscretePosterior {
  std::vector<double> support;  ///< distinct values, increasing
  std::vector<double> pmf;

  double mean() const;
  void validate() const;
};

/// Groups grid points with equal q (after rounding to 12 significant digits)
/// and sums their prior masses.
DiscretePosterior posterior_q(const GridEvaluation& evaluation, std::span<const double> prior_pmf);

/// Kernel standard deviation: sqrt(Var(support) / 16) with Var the population
/// variance of the distinct support values; max(1e-6, 1e-3 |mean|) when that
/// variance is zero.
double kernel_bandwidth(const DiscretePosterior& posterior);

/// Gaussian-kernel smoothed density at each point.
std::vector<double> smooth_density(const DiscretePosterior& posterior,
                                   std::span<const double> eval_points);
/// CDF of the smoothed density.
double smooth_cdf(const DiscretePosterior& posterior, double x);

struct CredibleInterval {
  double level = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Equal-tailed interval of the smoothed density, by bisection on its CDF.
/// Throws DomainError unless 0 < level < 1.
CredibleInterval credible_interval(const DiscretePosterior& posterior, double level);

/// Sum of the pmf over support values strictly greater than threshold.
double prob_greater(const DiscretePosterior& posterior, double threshold);

/// Evenly spaced points over [min support - 4 b, max support + 4 b].
std::vector<double> density_grid(const DiscretePosterior& posterior, std::size_t count = 512);

}  // namespace rhoflow
