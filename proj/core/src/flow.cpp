#include "rhoflow/flow.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rhoflow/errors.hpp"
#include "rhoflow/rng.hpp"

namespace rhoflow {

namespace {

using Matrix = Eigen::MatrixXd;
using MatrixMap = Eigen::Map<const Matrix>;
using VectorMap = Eigen::Map<const Eigen::VectorXd>;

// Views the conditioner section of the flat parameter vector.
class ConditionerView {
 public:
  ConditionerView(std::vector<int> layers, const double* params)
      : layers_(std::move(layers)), params_(params) {}

  std::size_t layer_count() const { return layers_.size() - 1; }

  MatrixMap weight(std::size_t l) const {
    return MatrixMap(params_ + offset(l), layers_[l + 1], layers_[l]);
  }
  VectorMap bias(std::size_t l) const {
    return VectorMap(params_ + offset(l) + layers_[l + 1] * layers_[l], layers_[l + 1]);
  }

  std::size_t offset(std::size_t l) const {
    std::size_t off = 0;
    for (std::size_t i = 0; i < l; ++i) {
      off += static_cast<std::size_t>(layers_[i + 1]) * (layers_[i] + 1);
    }
    return off;
  }

  // activations[0] is the input; the last entry is the linear output.
  std::vector<Matrix> forward(const Matrix& input) const {
    std::vector<Matrix> acts;
    acts.reserve(layers_.size());
    acts.push_back(input);
    for (std::size_t l = 0; l < layer_count(); ++l) {
      Matrix pre = weight(l) * acts.back();
      pre.colwise() += bias(l);
      if (l + 1 < layer_count()) pre = pre.array().tanh().matrix();
      acts.push_back(std::move(pre));
    }
    return acts;
  }

  // grad_out: d(objective)/d(output). Writes parameter gradients into grad.
  void backward(const std::vector<Matrix>& acts, Matrix grad_out, double* grad) const {
    for (std::size_t l = layer_count(); l-- > 0;) {
      const std::size_t off = offset(l);
      Eigen::Map<Matrix> gw(grad + off, layers_[l + 1], layers_[l]);
      Eigen::Map<Eigen::VectorXd> gb(grad + off + layers_[l + 1] * layers_[l], layers_[l + 1]);
      gw.noalias() = grad_out * acts[l].transpose();
      gb = grad_out.rowwise().sum();
      if (l > 0) {
        Matrix next = weight(l).transpose() * grad_out;
        grad_out = (next.array() * (1.0 - acts[l].array().square())).matrix();
      }
    }
  }

 private:
  std::vector<int> layers_;
  const double* params_;
};

ConditionerView conditioner_of(const RhoGnfModel& model) {
  return ConditionerView(model.conditioner_layers(),
                         model.parameters().data() + kSplineParamCount);
}

Matrix standardized_row(const RhoGnfModel& model, std::span<const double> a) {
  Matrix row(1, static_cast<Eigen::Index>(a.size()));
  const auto& s = model.a_standardizer();
  for (std::size_t i = 0; i < a.size(); ++i) row(0, static_cast<Eigen::Index>(i)) = s.apply(a[i]);
  return row;
}

void check_batch(std::span<const double> a, std::span<const double> y) {
  if (a.size() != y.size()) throw DataError("batch columns differ in length");
  if (a.empty()) throw DataError("batch is empty");
}

}  // namespace

Standardizer Standardizer::fit(std::span<const double> values) {
  if (values.empty()) throw DataError("cannot standardize an empty sample");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0)) throw DataError("variable is constant");
  return {mean, sd};
}

RhoGnfModel::RhoGnfModel(CopulaCorrelation rho, VariableKind a_kind, VariableKind y_kind,
                         std::vector<int> hidden_layers, std::uint64_t init_seed,
                         double dequant_sigma)
    : rho_(rho),
      a_kind_(a_kind),
      y_kind_(y_kind),
      hidden_(std::move(hidden_layers)),
      dequant_sigma_(dequant_sigma) {
  if (rho.is_degenerate()) throw DomainError("model correlation must satisfy |rho| < 1");
  if (!(dequant_sigma >= 0.0)) throw DomainError("dequantization sigma must be non-negative");
  for (int h : hidden_) {
    if (h < 1) throw DomainError("hidden layer widths must be positive");
  }
  const auto layers = conditioner_layers();
  std::size_t count = kSplineParamCount;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    count += static_cast<std::size_t>(layers[l + 1]) * (layers[l] + 1);
  }
  params_.assign(count, 0.0);

  const auto identity = identity_spline_raw();
  std::copy(identity.begin(), identity.end(), params_.begin());

  NormalSource normal(init_seed);
  std::uniform_real_distribution<double> spread(-2.0, 2.0);
  ConditionerView view(layers, params_.data() + kSplineParamCount);
  for (std::size_t l = 0; l < view.layer_count(); ++l) {
    double* base = params_.data() + kSplineParamCount + view.offset(l);
    const int fan_in = layers[l];
    const int fan_out = layers[l + 1];
    double* bias = base + static_cast<std::size_t>(fan_in) * fan_out;
    if (l + 1 == view.layer_count()) {
      // Zero output weights: every treatment value maps to the identity spline.
      std::fill(base, bias, 0.0);
      std::copy(identity.begin(), identity.end(), bias);
    } else if (l == 0) {
      // Scalar input: unit-variance weights and spread-out biases place the
      // tanh transitions across the standardized data range.
      for (double* w = base; w != bias; ++w) *w = normal();
      for (int j = 0; j < fan_out; ++j) bias[j] = spread(normal.engine());
    } else {
      const double sd = std::sqrt(2.0 / (fan_in + fan_out));
      for (double* w = base; w != bias; ++w) *w = sd * normal();
      std::fill(bias, bias + fan_out, 0.0);
    }
  }
}

void RhoGnfModel::set_parameters(std::span<const double> values) {
  if (values.size() != params_.size()) {
    throw DomainError("parameter vector length does not match the model");
  }
  std::copy(values.begin(), values.end(), params_.begin());
}

std::vector<int> RhoGnfModel::conditioner_layers() const {
  std::vector<int> layers;
  layers.reserve(hidden_.size() + 2);
  layers.push_back(1);
  layers.insert(layers.end(), hidden_.begin(), hidden_.end());
  layers.push_back(static_cast<int>(kSplineParamCount));
  return layers;
}

MonotoneTransformer RhoGnfModel::treatment_spline() const {
  return MonotoneTransformer::from_raw(std::span<const double>(params_).first(kSplineParamCount));
}

MonotoneTransformer RhoGnfModel::outcome_spline(double a) const {
  const double as[] = {a};
  return outcome_splines(as).front();
}

std::vector<MonotoneTransformer> RhoGnfModel::outcome_splines(std::span<const double> a) const {
  const auto view = conditioner_of(*this);
  const auto acts = view.forward(standardized_row(*this, a));
  const Matrix& out = acts.back();
  std::vector<MonotoneTransformer> splines;
  splines.reserve(a.size());
  for (Eigen::Index i = 0; i < out.cols(); ++i) {
    splines.push_back(MonotoneTransformer::from_raw(
        std::span<const double>(out.data() + i * out.rows(), kSplineParamCount)));
  }
  return splines;
}

GaussianPair forward(const RhoGnfModel& model, double a, double y) {
  const double as[] = {a};
  const double ys[] = {y};
  return forward_batch(model, as, ys).front().z;
}

std::vector<FlowPoint> forward_batch(const RhoGnfModel& model, std::span<const double> a,
                                     std::span<const double> y) {
  check_batch(a, y);
  const auto t_a = model.treatment_spline();
  const auto t_y = model.outcome_splines(a);
  const auto& sa = model.a_standardizer();
  const auto& sy = model.y_standardizer();
  const double log_sa = std::log(sa.scale);
  const double log_sy = std::log(sy.scale);
  std::vector<FlowPoint> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ea = t_a.evaluate(sa.apply(a[i]));
    const auto ey = t_y[i].evaluate(sy.apply(y[i]));
    out[i] = {{ea.value, ey.value}, ea.log_derivative - log_sa, ey.log_derivative - log_sy};
  }
  return out;
}

DataPoint inverse(const RhoGnfModel& model, GaussianPair pair, double a_for_outcome) {
  const double a_std = model.treatment_spline().inverse(pair.z_a);
  const double y_std = model.outcome_spline(a_for_outcome).inverse(pair.z_y);
  return {model.a_standardizer().invert(a_std), model.y_standardizer().invert(y_std)};
}

double log_likelihood(const RhoGnfModel& model, std::span<const double> a,
                      std::span<const double> y) {
  const auto points = forward_batch(model, a, y);
  double total = 0.0;
  for (const auto& p : points) {
    total += bivariate_normal_logpdf(p.z, model.rho()) + p.log_det_a + p.log_det_y;
  }
  if (!std::isfinite(total)) throw NumericError("log-likelihood is not finite");
  return total;
}

double log_likelihood_gradient(const RhoGnfModel& model, std::span<const double> a,
                               std::span<const double> y, std::span<double> gradient,
                               double roughness) {
  check_batch(a, y);
  if (gradient.size() != model.parameter_count()) {
    throw DomainError("gradient buffer length does not match the model");
  }
  std::fill(gradient.begin(), gradient.end(), 0.0);

  const auto& sa = model.a_standardizer();
  const auto& sy = model.y_standardizer();
  const double log_scales = std::log(sa.scale) + std::log(sy.scale);
  const auto params = model.parameters();
  const auto t_a = model.treatment_spline();
  const auto view = conditioner_of(model);
  const auto acts = view.forward(standardized_row(model, a));
  const Matrix& out = acts.back();
  Matrix grad_out(out.rows(), out.cols());

  SplineKnotGradient knot_grad_a;
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double a_std = sa.apply(a[i]);
    const double y_std = sy.apply(y[i]);
    const std::span<const double> raw_y(out.data() + i * kSplineParamCount, kSplineParamCount);
    const auto t_y = MonotoneTransformer::from_raw(raw_y);
    const auto ea = t_a.evaluate(a_std);
    const auto ey = t_y.evaluate(y_std);
    const GaussianPair z{ea.value, ey.value};
    total += bivariate_normal_logpdf(z, model.rho()) + ea.log_derivative + ey.log_derivative -
             log_scales;

    const auto dz = bivariate_normal_logpdf_gradient(z, model.rho());
    t_a.accumulate_gradient(a_std, dz.z_a, 1.0, knot_grad_a);
    SplineKnotGradient knot_grad_y;
    t_y.accumulate_gradient(y_std, dz.z_y, 1.0, knot_grad_y);
    if (roughness > 0.0) t_y.roughness(&knot_grad_y, -roughness);
    std::span<double> col(grad_out.data() + i * kSplineParamCount, kSplineParamCount);
    std::fill(col.begin(), col.end(), 0.0);
    backprop_to_raw(raw_y, knot_grad_y, col);
  }
  if (!std::isfinite(total)) throw NumericError("log-likelihood is not finite");
  if (roughness > 0.0) {
    t_a.roughness(&knot_grad_a, -roughness * static_cast<double>(a.size()));
  }

  backprop_to_raw(params.first(kSplineParamCount), knot_grad_a,
                  gradient.first(kSplineParamCount));
  view.backward(acts, std::move(grad_out), gradient.data() + kSplineParamCount);
  return total;
}

double dequantize(int value, const VariableKind& kind, double sigma, std::uint64_t seed) {
  if (!kind.is_discrete()) throw DomainError("dequantize requires a discrete variable kind");
  if (value < 0 || value >= kind.cardinality()) {
    std::ostringstream os;
    os << "category " << value << " is outside [0, " << kind.cardinality() << ")";
    throw DomainError(os.str());
  }
  NormalSource normal(seed);
  return static_cast<double>(value) + sigma * normal();
}

std::vector<double> dequantize_column(std::span<const double> values, const VariableKind& kind,
                                      double sigma, std::uint64_t seed) {
  std::vector<double> out(values.begin(), values.end());
  if (!kind.is_discrete()) return out;
  NormalSource normal(seed);
  for (auto& v : out) {
    if (v < 0.0 || v >= kind.cardinality() || v != std::floor(v)) {
      throw DataError("value outside the categories of " + kind.to_string());
    }
    v += sigma * normal();
  }
  return out;
}

int quantize(double value, const VariableKind& kind) {
  if (!kind.is_discrete()) throw DomainError("quantize requires a discrete variable kind");
  const double rounded = std::nearbyint(value);
  return static_cast<int>(std::clamp(rounded, 0.0, static_cast<double>(kind.cardinality() - 1)));
}

}  // namespace rhoflow
