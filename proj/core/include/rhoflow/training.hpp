#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rhoflow/copula.hpp"
#include "rhoflow/dataset.hpp"
#include "rhoflow/flow.hpp"

namespace rhoflow {

struct EpochRecord {
  std::size_t epoch = 0;
  double train_nll = 0.0;  ///< mean per-sample NLL over the epoch's minibatches
  double val_nll = 0.0;    ///< per-sample NLL on the validation split after the epoch
  /// val_nll plus the per-sample roughness penalty; early stopping monitors this.
  double val_objective = 0.0;
};

/// Maximum-likelihood training hyperparameters. Adam is the optimizer.
struct TrainConfig {
  double learning_rate = 1e-3;
  /// Cosine-anneal the learning rate towards min_lr_fraction * learning_rate
  /// over max_epochs; constant when false.
  bool cosine_decay = false;
  double min_lr_fraction = 0.01;
  std::size_t batch_size = 512;
  std::size_t max_epochs = 200;
  /// Epochs without validation improvement before stopping.
  std::size_t patience = 20;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
  std::vector<int> hidden_layers{32, 32};
  double dequant_sigma = kDefaultDequantSigma;
  /// Per-observation weight of the spline roughness penalty (see
  /// MonotoneTransformer::roughness). Zero gives plain maximum likelihood.
  double roughness = 0.1;
  /// Decay of the exponential moving average of parameters that is validated
  /// and returned; 0 validates the raw optimizer iterate.
  double ema_decay = 0.998;
  /// Optional observer called after every epoch with the current parameters.
  std::function<void(const EpochRecord&, const RhoGnfModel&)> on_epoch;

  /// Throws DomainError on out-of-range values.
  void validate() const;
};


struct TrainReport {
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  /// Values at the best validation epoch, i.e. for the returned parameters.
  double final_train_nll = 0.0;
  double final_val_nll = 0.0;
  std::vector<EpochRecord> nll_history;
};

struct FitResult {
  RhoGnfModel model;
  TrainReport report;
};

/// Trains a flow with the copula correlation fixed at rho and returns the
/// parameter snapshot with the lowest validation NLL.
/// Throws NumericError if training diverges, DataError for constant columns.
FitResult fit(const ObservationalDataset& dataset, CopulaCorrelation rho,
              const TrainConfig& config);

struct GridFit {
  CopulaCorrelation rho;
  std::uint64_t seed = 0;
  RhoGnfModel model;
  TrainReport report;
};

struct DequantizedColumns {
  std::vector<double> a;
  std::vector<double> y;
};

/// The dequantized copy of the data a fit with this seed trains on.
DequantizedColumns dequantized_columns(const ObservationalDataset& dataset, double sigma,
                                       std::uint64_t seed);

/// Seed used for the grid point at index.
std::uint64_t grid_seed(std::uint64_t base_seed, std::size_t index);

/// One independent fit per grid value (strictly increasing, within
/// [-0.99, 0.99]). Grid point i trains with seed grid_seed(config.seed, i),
/// so results do not depend on jobs or scheduling order.
std::vector<GridFit> fit_grid(const ObservationalDataset& dataset, std::span<const double> grid,
                              const TrainConfig& config, unsigned jobs = 1);

/// -0.99, -0.8, ..., 0.8, 0.99 (11 points).
std::vector<double> default_curve_grid();
/// -0.99, -0.95, -0.9, ..., 0.9, 0.95, 0.99 (41 points).
std::vector<double> default_bayes_grid();

/// Throws DomainError unless the grid is strictly increasing within [lo, hi].
void validate_grid(std::span<const double> grid, double lo, double hi, std::size_t min_size = 1);

}  // namespace rhoflow
