#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rhoflow/copula.hpp"
#include "rhoflow/dataset.hpp"
#include "rhoflow/flow.hpp"

namespace rhoflow {

/// Linear-Gaussian SCM:  A := e_A,  Y := alpha A + e_Y,
/// (e_A, e_Y) ~ N(0, [[1, beta], [beta, delta]]).
struct LinearScmSpec {
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 1.0;

  /// Throws DomainError unless delta > 0 and beta^2 <= delta.
  void validate() const;
};

struct LinearScmStats {
  double rho_p_obs = 0.0;  ///< Pearson correlation of (A, Y)
  double rho_true = 0.0;   ///< correlation of the noises, beta / sqrt(delta)
  double ace_true = 0.0;   ///< alpha
};

/// The six reference SCMs (index 1..6); throws DomainError otherwise.
LinearScmSpec table1_scm(int index);

LinearScmStats linear_scm_stats(const LinearScmSpec& spec);
ObservationalDataset sample_linear_scm(const LinearScmSpec& spec, std::size_t n, std::uint64_t seed);

/// Binary confounder U, binary treatment A, binary outcome Y.
struct BinaryScmSpec {
  double p_u = 0.5;                    ///< P(U = 1)
  double p_a_given_u[2] = {0.5, 0.5};  ///< P(A = 1 | U = u)
  /// P(Y = 1 | A = a, U = u) at index 2a + u.
  double p_y_given_a_u[4] = {0.5, 0.5, 0.5, 0.5};

  void validate() const;
};

/// Every probability drawn independently from U(0, 1).
BinaryScmSpec random_binary_scm(std::uint64_t seed);
/// Master seed of the reference binary-confounder suite.
inline constexpr std::uint64_t kBinarySuiteSeed = 2024;

/// Member `index` of the reproducible binary-confounder suite.
BinaryScmSpec binary_suite_scm(std::uint64_t master_seed, std::size_t index);

/// sum_u [P(Y=1|A=1,u) - P(Y=1|A=0,u)] P(u).
double binary_scm_ace(const BinaryScmSpec& spec);

struct BinaryScmSample {
  ObservationalDataset dataset;  ///< (A, Y) only; U is discarded
  double ace_true = 0.0;
};
BinaryScmSample sample_binary_scm(const BinaryScmSpec& spec, std::size_t n, std::uint64_t seed);

/// Hidden-confounder SCM equivalent to a copula flow:
///   U := e_U
///   A := T_A^{-1}((gamma U + delta e_A) / sqrt(gamma^2 + delta^2))
///   Y := T_{Y|A}^{-1}(A, lambda rho U + tau sqrt(1 - rho^2) e_Y)
struct EquivScmSpec {
  double rho = 0.0;
  double gamma = 1.0;
  double delta = 0.0;
  double lambda = 1.0;  ///< sqrt(gamma^2 + delta^2) / gamma
  double tau = 1.0;     ///< sqrt(1/(1-rho^2) - lambda^2 rho^2 / (1-rho^2))
};

/// Throws DomainError for gamma = 0, |rho| >= 1 or |delta| beyond
/// sqrt((1 - rho^2) gamma^2 / rho^2).
EquivScmSpec equiv_scm_params(double rho, double gamma, double delta);

/// Latent scores produced by the equivalent SCM's noises.
GaussianPair equiv_latent(const EquivScmSpec& spec, double u, double eps_a, double eps_y);

/// Structural functions of the equivalent SCM.
double equiv_treatment(const EquivScmSpec& spec, const RhoGnfModel& model, double u, double eps_a);
double equiv_outcome(const EquivScmSpec& spec, const RhoGnfModel& model, double u, double a,
                     double eps_y);

struct EquivScmSample {
  std::vector<double> u;
  std::vector<double> a;
  std::vector<double> y;
};
EquivScmSample sample_equiv_scm(const EquivScmSpec& spec, const RhoGnfModel& model, std::size_t n,
                                std::uint64_t seed);

struct InfluenceSigns {
  int on_treatment = 0;  ///< sign of dA/dU
  int on_outcome = 0;    ///< sign of dY/dU at fixed A
};
/// Throws DomainError at rho = 0, where the outcome sign is undefined.
InfluenceSigns influence_signs(const EquivScmSpec& spec);

}  // namespace rhoflow
