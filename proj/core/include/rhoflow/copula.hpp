#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rhoflow {

/// Correlation of the Gaussian copula linking the latent treatment and outcome
/// noises. Always within [-1, 1]; density operations additionally need |rho| < 1.
class CopulaCorrelation {
 public:
  CopulaCorrelation() = default;
  explicit CopulaCorrelation(double rho);

  double value() const noexcept { return rho_; }
  bool is_degenerate() const noexcept { return rho_ == 1.0 || rho_ == -1.0; }

  friend bool operator==(CopulaCorrelation, CopulaCorrelation) = default;

 private:
  double rho_ = 0.0;
};

/// Latent normal scores (Z_A, Z_Y).
struct GaussianPair {
  double z_a = 0.0;
  double z_y = 0.0;
};

/// Standard normal CDF.
double std_normal_cdf(double z);

/// Standard normal log-density.
double std_normal_logpdf(double z);

/// Inverse of the standard normal CDF (Wichura's AS 241, ~1e-16 relative).
/// Throws DomainError unless 0 < u < 1.
double std_normal_quantile(double u);

/// Log-density of the standard bivariate normal with correlation rho.
/// Throws DomainError when |rho| = 1.
double bivariate_normal_logpdf(GaussianPair pair, CopulaCorrelation rho);

/// Partial derivatives of bivariate_normal_logpdf with respect to (z_a, z_y).
GaussianPair bivariate_normal_logpdf_gradient(GaussianPair pair, CopulaCorrelation rho);

/// Draws n pairs as z_y = rho z_a + sqrt(1 - rho^2) e.
std::vector<GaussianPair> sample_bivariate(CopulaCorrelation rho, std::size_t n,
                                           std::uint64_t seed);

/// Pearson product-moment correlation. Throws DataError for constant input.
double pearson(std::span<const double> x, std::span<const double> y);

/// Average ranks (1-based), ties receive the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> y);

/// Gaussian-copula correlation implied by a Spearman correlation:
/// rho = 2 sin(pi rho_s / 6).
CopulaCorrelation pearson_from_spearman(double rho_s);

}  // namespace rhoflow
