#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rhoflow/dataset.hpp"
#include "rhoflow/flow.hpp"
#include "rhoflow/training.hpp"

namespace rhoflow {

/// Intervention levels do(A := treated) versus do(A := control), on the
/// original treatment scale.
struct TreatmentLevels {
  double treated = 1.0;
  double control = 0.0;
};

/// z_y = T_{Y|A}(Y) for every observation. Discrete columns are dequantized
/// with the same stream a fit with `seed` used, so for a trained model these
/// are exactly the latent scores of its training data.
std::vector<double> recover_noise(const RhoGnfModel& model, const ObservationalDataset& dataset,
                                  std::uint64_t seed);

struct PotentialOutcomes {
  std::vector<double> values;   ///< T_{Y|a}^{-1}(z) on the continuous scale
  std::vector<int> categories;  ///< quantized values; empty for continuous outcomes
};

PotentialOutcomes potential_outcomes(const RhoGnfModel& model, std::span<const double> z_y,
                                     double a);

struct AceEstimate {
  double ace = 0.0;      ///< E[Y_1] - E[Y_0] on the continuous scale
  double mean_y1 = 0.0;  ///< E[Y | do(A := treated)]
  double mean_y0 = 0.0;  ///< E[Y | do(A := control)]
  std::optional<double> quantized_ace;  ///< discrete outcomes only
};

/// Three-step Monte-Carlo estimator: recover noises, push them through the
/// intervened outcome transformer, average the difference.
AceEstimate estimate_ace(const RhoGnfModel& model, const ObservationalDataset& dataset,
                         TreatmentLevels levels, std::uint64_t seed);

struct CurvePoint {
  double rho = 0.0;
  double ace = 0.0;
  double mean_y1 = 0.0;
  double mean_y0 = 0.0;
  std::optional<double> quantized_ace;
  std::uint64_t seed = 0;
};

/// Assumption-free bounds for a binary outcome.
struct AfBounds {
  double lower = 0.0;
  double upper = 0.0;
};

struct RhoCurve {
  std::vector<CurvePoint> points;  ///< sorted by rho
  double rho_value = 0.0;          ///< analytic, from the observed Spearman correlation
  std::optional<double> crossing_rho;  ///< where the fitted curve first crosses zero
  double inf_ace = 0.0;
  double sup_ace = 0.0;
  std::optional<AfBounds> af_bounds;

  std::vector<double> grid() const;
  std::vector<double> aces() const;
  /// Piecewise-linear interpolation; throws DomainError outside the grid.
  double ace_at(double rho) const;
};

/// Assembles a curve from already fitted grid models.
RhoCurve curve_from_fits(const ObservationalDataset& dataset, std::span<const GridFit> fits,
                         TreatmentLevels levels);

/// Trains one flow per grid value and evaluates the ACE at each.
RhoCurve rho_curve(const ObservationalDataset& dataset, std::span<const double> grid,
                   const TrainConfig& config, TreatmentLevels levels, unsigned jobs = 1);

/// 2 sin(pi rho_S / 6) from the Spearman correlation of the raw columns.
double rho_value(const ObservationalDataset& dataset);

/// Plug-in bounds q1 p1 - q0 p0 - p1 <= ACE <= q1 p1 - q0 p0 + p0.
AfBounds af_bounds(const ObservationalDataset& dataset);
AfBounds af_bounds(std::span<const double> a, std::span<const double> y);

/// Sum of per-indicator bounds for an outcome that is the sum of binary
/// indicators.
AfBounds af_bounds_sum(std::span<const double> a,
                       std::span<const std::vector<double>> indicators);

/// Range of the interpolated curve over [rho_min, rho_max].
std::pair<double, double> ace_interval(const RhoCurve& curve, double rho_min, double rho_max);

}  // namespace rhoflow
