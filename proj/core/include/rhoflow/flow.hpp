#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rhoflow/copula.hpp"
#include "rhoflow/dataset.hpp"
#include "rhoflow/spline.hpp"

namespace rhoflow {

/// Affine pre-map x -> (x - shift) / scale applied before the spline.
struct Standardizer {
  double shift = 0.0;
  double scale = 1.0;

  double apply(double x) const noexcept { return (x - shift) / scale; }
  double invert(double z) const noexcept { return z * scale + shift; }

  /// Mean and (population) standard deviation of the sample.
  /// Throws DataError for a constant sample.
  static Standardizer fit(std::span<const double> values);
};

inline constexpr double kDefaultDequantSigma = 0.25;

/// Bivariate copula flow:
///   Z_A = T_A(A),  Z_Y = T_{Y|A}(Y),  (Z_A, Z_Y) ~ N(0, [[1, rho], [rho, 1]]).
///
/// T_A is an unconditional monotone spline. T_{Y|A=a} is a monotone spline
/// whose raw parameters are emitted by a tanh MLP conditioner fed with the
/// standardized treatment. All trainable parameters live in one flat vector:
///   [T_A raw spline parameters | conditioner layer 1 W, b | layer 2 W, b | ...]
/// with weight matrices stored column-major (out x in). rho is fixed at
/// construction and is never part of the trainable parameters.
class RhoGnfModel {
 public:
  /// Identity-initialized model: both transformers start as y = x for any
  /// treatment value. Hidden layers are drawn from init_seed.
  RhoGnfModel(CopulaCorrelation rho, VariableKind a_kind, VariableKind y_kind,
              std::vector<int> hidden_layers = {32, 32}, std::uint64_t init_seed = 0,
              double dequant_sigma = kDefaultDequantSigma);

  CopulaCorrelation rho() const noexcept { return rho_; }
  const VariableKind& a_kind() const noexcept { return a_kind_; }
  const VariableKind& y_kind() const noexcept { return y_kind_; }
  double dequant_sigma() const noexcept { return dequant_sigma_; }
  const std::vector<int>& hidden_layers() const noexcept { return hidden_; }

  const Standardizer& a_standardizer() const noexcept { return a_std_; }
  const Standardizer& y_standardizer() const noexcept { return y_std_; }
  void set_standardizers(Standardizer a, Standardizer y) noexcept {
    a_std_ = a;
    y_std_ = y;
  }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }
  /// Replaces all trainable parameters; the length must match.
  void set_parameters(std::span<const double> values);

  /// Layer widths of the conditioner including input (1) and output sizes.
  std::vector<int> conditioner_layers() const;

  /// T_A on the standardized treatment scale.
  MonotoneTransformer treatment_spline() const;
  /// T_{Y|A=a} on the standardized outcome scale, for a on the original scale.
  MonotoneTransformer outcome_spline(double a) const;
  /// Batched variant: one spline per treatment value.
  std::vector<MonotoneTransformer> outcome_splines(std::span<const double> a) const;

 private:
  CopulaCorrelation rho_;
  VariableKind a_kind_;
  VariableKind y_kind_;
  std::vector<int> hidden_;
  double dequant_sigma_;
  Standardizer a_std_;
  Standardizer y_std_;
  std::vector<double> params_;
};

/// Latent image of one observation plus the log-derivatives of both
/// transformers on the original data scale.
struct FlowPoint {
  GaussianPair z;
  double log_det_a = 0.0;
  double log_det_y = 0.0;
};

struct DataPoint {
  double a = 0.0;
  double y = 0.0;
};

GaussianPair forward(const RhoGnfModel& model, double a, double y);
std::vector<FlowPoint> forward_batch(const RhoGnfModel& model, std::span<const double> a,
                                     std::span<const double> y);

/// a = T_A^{-1}(z_a), y = T_{Y|A=a_for_outcome}^{-1}(z_y).
DataPoint inverse(const RhoGnfModel& model, GaussianPair pair, double a_for_outcome);

/// Sum over the batch of log f_Z(T(x)) + log T_A'(a) + log T_{Y|A}'(y).
/// Discrete columns must already be dequantized.
double log_likelihood(const RhoGnfModel& model, std::span<const double> a,
                      std::span<const double> y);

/// Returns the summed log-likelihood and writes the exact gradient of
///   log-likelihood - roughness * sum_i (R(T_{Y|A=a_i}) + R(T_A))
/// with respect to every trainable parameter into gradient (overwritten),
/// where R is MonotoneTransformer::roughness.
double log_likelihood_gradient(const RhoGnfModel& model, std::span<const double> a,
                               std::span<const double> y, std::span<double> gradient,
                               double roughness = 0.0);

/// value + sigma * e with e ~ N(0, 1) drawn from seed.
double dequantize(int value, const VariableKind& kind, double sigma, std::uint64_t seed);
/// Dequantizes a whole column from one random stream. Continuous columns are
/// returned unchanged.
std::vector<double> dequantize_column(std::span<const double> values, const VariableKind& kind,
                                      double sigma, std::uint64_t seed);
/// Nearest category, clamped to [0, cardinality - 1].
int quantize(double value, const VariableKind& kind);

}  // namespace rhoflow
