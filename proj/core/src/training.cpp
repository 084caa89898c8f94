#include "rhoflow/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "rhoflow/errors.hpp"
#include "rhoflow/rng.hpp"

namespace rhoflow {

namespace {

constexpr double kMaxRho = 0.99;
constexpr double kDivergenceNll = 1e6;

class Adam {
 public:
  Adam(std::size_t size, double learning_rate)
      : lr_(learning_rate), m_(size, 0.0), v_(size, 0.0) {}

  // Descends along the loss gradient.
  void set_learning_rate(double lr) noexcept { lr_ = lr; }

  void step(std::span<double> params, std::span<const double> grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
      v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  double lr_;
  std::size_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

void gather(std::span<const double> src, std::span<const std::size_t> idx, std::vector<double>& dst) {
  dst.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) dst[i] = src[idx[i]];
}

double mean_nll(const RhoGnfModel& model, std::span<const double> a, std::span<const double> y) {
  return -log_likelihood(model, a, y) / static_cast<double>(a.size());
}

double mean_roughness(const RhoGnfModel& model, std::span<const double> a) {
  double total = 0.0;
  for (const auto& t : model.outcome_splines(a)) total += t.roughness();
  return total / static_cast<double>(a.size()) + model.treatment_spline().roughness();
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw DomainError("learning rate must be positive");
  if (batch_size == 0) throw DomainError("batch size must be positive");
  if (max_epochs == 0) throw DomainError("max_epochs must be positive");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw DomainError("validation fraction must lie in (0, 1)");
  }
  if (!(dequant_sigma >= 0.0)) throw DomainError("dequantization sigma must be non-negative");
  if (!(roughness >= 0.0)) throw DomainError("roughness weight must be non-negative");
  if (!(ema_decay >= 0.0 && ema_decay < 1.0)) throw DomainError("EMA decay must lie in [0, 1)");
}

FitResult fit(const ObservationalDataset& dataset, CopulaCorrelation rho,
              const TrainConfig& config) {
  config.validate();
  dataset.validate();
  if (std::abs(rho.value()) > kMaxRho) {
    throw DomainError("training requires |rho| <= 0.99");
  }
  const std::size_t n = dataset.size();
  if (n < 2) throw DataError("training needs at least two observations");

  const auto [a, y] = dequantized_columns(dataset, config.dequant_sigma, config.seed);

  RhoGnfModel model(rho, dataset.a_kind, dataset.y_kind, config.hidden_layers,
                    mix_seed(config.seed, seed_stream::init), config.dequant_sigma);
  model.set_standardizers(Standardizer::fit(a), Standardizer::fit(y));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng split_rng(mix_seed(config.seed, seed_stream::split));
  std::shuffle(order.begin(), order.end(), split_rng);
  const auto n_val = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(config.validation_fraction * static_cast<double>(n))),
      1, n - 1);
  std::vector<std::size_t> train_idx(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
  const std::vector<std::size_t> val_idx(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
  std::vector<double> val_a, val_y;
  gather(a, val_idx, val_a);
  gather(y, val_idx, val_y);

  const std::size_t batch = std::min(config.batch_size, train_idx.size());
  Adam optimizer(model.parameter_count(), config.learning_rate);
  Rng shuffle_rng(mix_seed(config.seed, seed_stream::shuffle));
  std::vector<double> grad(model.parameter_count());
  std::vector<double> batch_a, batch_y;

  TrainReport report;
  std::vector<double> best_params(model.parameters().begin(), model.parameters().end());
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  const bool use_ema = config.ema_decay > 0.0;
  std::vector<double> ema(best_params);
  std::vector<double> iterate;
  std::size_t steps = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), shuffle_rng);
    if (config.cosine_decay) {
      const double progress = static_cast<double>(epoch - 1) / static_cast<double>(config.max_epochs);
      const double f = config.min_lr_fraction +
                       (1.0 - config.min_lr_fraction) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
      optimizer.set_learning_rate(config.learning_rate * f);
    }
    double epoch_nll = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < train_idx.size(); start += batch) {
      const std::size_t len = std::min(batch, train_idx.size() - start);
      const std::span<const std::size_t> idx(train_idx.data() + start, len);
      gather(a, idx, batch_a);
      gather(y, idx, batch_y);
      double ll;
      try {
        ll = log_likelihood_gradient(model, batch_a, batch_y, grad, config.roughness);
      } catch (const NumericError&) {
        throw NumericError("training diverged: non-finite minibatch loss");
      }
      const double nll = -ll / static_cast<double>(len);
      if (!std::isfinite(nll) || nll > kDivergenceNll) {
        std::ostringstream os;
        os << "training diverged at epoch " << epoch << " (minibatch NLL " << nll << ")";
        throw NumericError(os.str());
      }
      const double scale = -1.0 / static_cast<double>(len);
      for (auto& g : grad) g *= scale;
      optimizer.step(model.parameters(), grad);
      if (use_ema) {
        // Bias-corrected warm-up so early averages are not tied to the init.
        const double decay = std::min(config.ema_decay, (1.0 + static_cast<double>(steps)) /
                                                            (10.0 + static_cast<double>(steps)));
        const auto p = model.parameters();
        for (std::size_t i = 0; i < ema.size(); ++i) ema[i] = decay * ema[i] + (1.0 - decay) * p[i];
        ++steps;
      }
      epoch_nll += nll * static_cast<double>(len);
      seen += len;
    }
    if (use_ema) {
      iterate.assign(model.parameters().begin(), model.parameters().end());
      model.set_parameters(ema);
    }
    double val_nll;
    try {
      val_nll = mean_nll(model, val_a, val_y);
    } catch (const NumericError&) {
      throw NumericError("training diverged: non-finite validation loss");
    }
    const double val_objective =
        config.roughness > 0.0 ? val_nll + config.roughness * mean_roughness(model, val_a) : val_nll;
    report.nll_history.push_back(
        {epoch, epoch_nll / static_cast<double>(seen), val_nll, val_objective});
    report.epochs_run = epoch;
    if (config.on_epoch) config.on_epoch(report.nll_history.back(), model);
    if (val_objective < best_val) {
      best_val = val_objective;
      since_best = 0;
      report.best_epoch = epoch;
      std::copy(model.parameters().begin(), model.parameters().end(), best_params.begin());
    } else if (++since_best >= config.patience) {
      break;
    }
    if (use_ema) model.set_parameters(iterate);
  }
  model.set_parameters(best_params);
  const auto& best = report.nll_history[report.best_epoch - 1];
  report.final_train_nll = best.train_nll;
  report.final_val_nll = best.val_nll;
  return {std::move(model), std::move(report)};
}

DequantizedColumns dequantized_columns(const ObservationalDataset& dataset, double sigma,
                                       std::uint64_t seed) {
  const auto dq = mix_seed(seed, seed_stream::dequantize);
  return {dequantize_column(dataset.a, dataset.a_kind, sigma, mix_seed(dq, 0)),
          dequantize_column(dataset.y, dataset.y_kind, sigma, mix_seed(dq, 1))};
}

std::uint64_t grid_seed(std::uint64_t base_seed, std::size_t index) {
  return mix_seed(mix_seed(base_seed, seed_stream::grid), index);
}

void validate_grid(std::span<const double> grid, double lo, double hi, std::size_t min_size) {
  if (grid.size() < min_size) {
    std::ostringstream os;
    os << "grid needs at least " << min_size << " points";
    throw DomainError(os.str());
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= lo && grid[i] <= hi)) {
      std::ostringstream os;
      os << "grid value " << grid[i] << " lies outside [" << lo << ", " << hi << "]";
      throw DomainError(os.str());
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw DomainError("grid values must be strictly increasing");
    }
  }
}

std::vector<GridFit> fit_grid(const ObservationalDataset& dataset, std::span<const double> grid,
                              const TrainConfig& config, unsigned jobs) {
  validate_grid(grid, -kMaxRho, kMaxRho);
  std::vector<std::optional<GridFit>> results(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        TrainConfig cfg = config;
        cfg.seed = grid_seed(config.seed, i);
        auto fitted = fit(dataset, CopulaCorrelation(grid[i]), cfg);
        results[i].emplace(GridFit{CopulaCorrelation(grid[i]), cfg.seed, std::move(fitted.model),
                                   std::move(fitted.report)});
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const unsigned threads = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(grid.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!errors[i]) continue;
    std::ostringstream tag;
    tag << "grid point rho=" << grid[i] << ": ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.category(), tag.str() + e.what());
    }
  }
  std::vector<GridFit> out;
  out.reserve(grid.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

std::vector<double> default_curve_grid() {
  return {-0.99, -0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8, 0.99};
}

std::vector<double> default_bayes_grid() {
  std::vector<double> grid{-0.99};
  for (int k = -19; k <= 19; ++k) grid.push_back(k / 20.0);
  grid.push_back(0.99);
  return grid;
}

}  // namespace rhoflow
