#include "rhoflow/spline.hpp"

#include <algorithm>
#include <cmath>

#include "rhoflow/errors.hpp"

namespace rhoflow {

namespace {

constexpr int K = kSplineBins;
constexpr double kMinWidthFraction = 1e-3;
constexpr double kMinHeight = 1e-3;
constexpr double kMinDerivative = 1e-3;

constexpr double kMinSlope = 1e-3;

constexpr std::size_t kShiftIndex = K;
constexpr std::size_t kSlopeIndex = K + 1;
constexpr std::size_t kHeightBegin = K + 2;
constexpr std::size_t kDerivBegin = 2 * K + 2;

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double inverse_softplus(double y) { return y + std::log(-std::expm1(-y)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Forward-mode dual number over the six local knot quantities of one bin:
// (x_k, x_{k+1}, y_k, y_{k+1}, d_k, d_{k+1}).
struct Dual {
  double v = 0.0;
  std::array<double, 6> g{};

  static Dual seed(double value, int slot) {
    Dual d{value, {}};
    d.g[static_cast<std::size_t>(slot)] = 1.0;
    return d;
  }
};

Dual operator+(const Dual& a, const Dual& b) {
  Dual r{a.v + b.v, {}};
  for (std::size_t i = 0; i < 6; ++i) r.g[i] = a.g[i] + b.g[i];
  return r;
}
Dual operator-(const Dual& a, const Dual& b) {
  Dual r{a.v - b.v, {}};
  for (std::size_t i = 0; i < 6; ++i) r.g[i] = a.g[i] - b.g[i];
  return r;
}
Dual operator*(const Dual& a, const Dual& b) {
  Dual r{a.v * b.v, {}};
  for (std::size_t i = 0; i < 6; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  return r;
}
Dual operator/(const Dual& a, const Dual& b) {
  const double inv = 1.0 / b.v;
  Dual r{a.v * inv, {}};
  for (std::size_t i = 0; i < 6; ++i) r.g[i] = (a.g[i] - r.v * b.g[i]) * inv;
  return r;
}
Dual operator*(double s, const Dual& a) {
  Dual r{s * a.v, {}};
  for (std::size_t i = 0; i < 6; ++i) r.g[i] = s * a.g[i];
  return r;
}
Dual operator-(double s, const Dual& a) {
  Dual r{s - a.v, {}};
  for (std::size_t i = 0; i < 6; ++i) r.g[i] = -a.g[i];
  return r;
}
Dual log(const Dual& a) {
  Dual r{std::log(a.v), {}};
  for (std::size_t i = 0; i < 6; ++i) r.g[i] = a.g[i] / a.v;
  return r;
}

template <class T>
struct BinResult {
  T value;
  T log_derivative;
};

// Rational-quadratic segment between (xk, yk) and (xk1, yk1) with end slopes
// dk and dk1.
template <class T, class In>
BinResult<T> rq_segment(In x, const T& xk, const T& xk1, const T& yk, const T& yk1, const T& dk,
                        const T& dk1) {
  using std::log;
  const T w = xk1 - xk;
  const T h = yk1 - yk;
  const T s = h / w;
  const T xi = (x - xk) / w;
  const T one_minus = 1.0 - xi;
  const T t = xi * one_minus;
  const T den = s + (dk1 + dk - 2.0 * s) * t;
  const T num = h * (s * xi * xi + dk * t);
  const T value = yk + num / den;
  const T dnum = dk1 * xi * xi + 2.0 * s * t + dk * one_minus * one_minus;
  const T log_derivative = 2.0 * log(s) + log(dnum) - 2.0 * log(den);
  return {value, log_derivative};
}

}  // namespace

SplineRaw identity_spline_raw() {
  SplineRaw raw{};
  raw[kSlopeIndex] = inverse_softplus(1.0 - kMinSlope);
  for (int k = 0; k < K; ++k) raw[kHeightBegin + k] = inverse_softplus(1.0 - kMinHeight);
  for (int k = 0; k <= K; ++k) raw[kDerivBegin + k] = inverse_softplus(1.0 - kMinDerivative);
  return raw;
}

namespace {

std::array<double, K> bin_widths(std::span<const double> raw) {
  double max_logit = raw[0];
  for (int k = 1; k < K; ++k) max_logit = std::max(max_logit, raw[k]);
  std::array<double, K> w{};
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    w[k] = std::exp(raw[k] - max_logit);
    total += w[k];
  }
  const double span = 2.0 * kSplineBound;
  for (auto& v : w) v = span * (kMinWidthFraction + (1.0 - K * kMinWidthFraction) * v / total);
  return w;
}

}  // namespace

MonotoneTransformer MonotoneTransformer::from_raw(std::span<const double> raw) {
  if (raw.size() != kSplineParamCount) {
    throw DomainError("spline parameter vector has the wrong length");
  }
  MonotoneTransformer t;
  const auto w = bin_widths(raw);
  const double g = kMinSlope + softplus(raw[kSlopeIndex]);
  t.xs_[0] = -kSplineBound;
  for (int k = 0; k < K - 1; ++k) t.xs_[k + 1] = t.xs_[k] + w[k];
  t.xs_[K] = kSplineBound;

  t.ys_[0] = raw[kShiftIndex] - g * kSplineBound;
  for (int k = 0; k < K; ++k) {
    t.ys_[k + 1] = t.ys_[k] + g * w[k] * (kMinHeight + softplus(raw[kHeightBegin + k]));
  }
  for (int k = 0; k <= K; ++k) t.ds_[k] = g * (kMinDerivative + softplus(raw[kDerivBegin + k]));
  return t;
}

int MonotoneTransformer::bin_of_input(double x) const {
  const auto it = std::upper_bound(xs_.begin() + 1, xs_.end() - 1, x);
  return static_cast<int>(it - xs_.begin()) - 1;
}

MonotoneTransformer::Value MonotoneTransformer::evaluate(double x) const {
  if (x <= xs_[0]) return {ys_[0] + ds_[0] * (x - xs_[0]), std::log(ds_[0])};
  if (x >= xs_[K]) return {ys_[K] + ds_[K] * (x - xs_[K]), std::log(ds_[K])};
  const int k = bin_of_input(x);
  const auto r = rq_segment<double>(x, xs_[k], xs_[k + 1], ys_[k], ys_[k + 1], ds_[k], ds_[k + 1]);
  return {r.value, r.log_derivative};
}

double MonotoneTransformer::derivative(double x) const { return std::exp(evaluate(x).log_derivative); }

double MonotoneTransformer::inverse(double y) const {
  if (y <= ys_[0]) return xs_[0] + (y - ys_[0]) / ds_[0];
  if (y >= ys_[K]) return xs_[K] + (y - ys_[K]) / ds_[K];
  const auto it = std::upper_bound(ys_.begin() + 1, ys_.end() - 1, y);
  const int k = static_cast<int>(it - ys_.begin()) - 1;
  const double w = xs_[k + 1] - xs_[k];
  const double h = ys_[k + 1] - ys_[k];
  const double s = h / w;
  const double dy = y - ys_[k];
  const double sum = ds_[k + 1] + ds_[k] - 2.0 * s;
  const double qa = h * (s - ds_[k]) + dy * sum;
  const double qb = h * ds_[k] - dy * sum;
  const double qc = -s * dy;
  const double disc = std::max(qb * qb - 4.0 * qa * qc, 0.0);
  // Numerically stable root of qa xi^2 + qb xi + qc = 0 lying in [0, 1].
  const double xi = (2.0 * qc) / (-qb - std::sqrt(disc));
  return xs_[k] + std::clamp(xi, 0.0, 1.0) * w;
}

void MonotoneTransformer::accumulate_gradient(double x, double grad_value,
                                              double grad_log_derivative,
                                              SplineKnotGradient& out) const {
  if (x <= xs_[0] || x >= xs_[K]) {
    const int k = x <= xs_[0] ? 0 : K;
    const double dx = x - xs_[k];
    // value = y_k + d_k (x - x_k), log-derivative = log d_k
    out.x[k] -= grad_value * ds_[k];
    out.y[k] += grad_value;
    out.d[k] += grad_value * dx + grad_log_derivative / ds_[k];
    return;
  }
  const int k = bin_of_input(x);
  const auto r = rq_segment<Dual>(x, Dual::seed(xs_[k], 0), Dual::seed(xs_[k + 1], 1),
                                  Dual::seed(ys_[k], 2), Dual::seed(ys_[k + 1], 3),
                                  Dual::seed(ds_[k], 4), Dual::seed(ds_[k + 1], 5));
  auto g = [&](std::size_t slot) {
    return grad_value * r.value.g[slot] + grad_log_derivative * r.log_derivative.g[slot];
  };
  out.x[k] += g(0);
  out.x[k + 1] += g(1);
  out.y[k] += g(2);
  out.y[k + 1] += g(3);
  out.d[k] += g(4);
  out.d[k + 1] += g(5);
}

double MonotoneTransformer::roughness(SplineKnotGradient* out, double weight) const {
  // Sequence l_0 = log d_0, l_1 = log s_0, l_2 = log d_1, ..., l_{2K} = log d_K.
  std::array<double, 2 * K + 1> l{};
  for (int k = 0; k <= K; ++k) l[2 * k] = std::log(ds_[k]);
  for (int k = 0; k < K; ++k) {
    l[2 * k + 1] = std::log(ys_[k + 1] - ys_[k]) - std::log(xs_[k + 1] - xs_[k]);
  }
  double total = 0.0;
  std::array<double, 2 * K + 1> g{};
  for (std::size_t i = 0; i + 1 < l.size(); ++i) {
    const double diff = l[i + 1] - l[i];
    total += diff * diff;
    g[i + 1] += 2.0 * diff;
    g[i] -= 2.0 * diff;
  }
  if (out != nullptr) {
    for (int k = 0; k <= K; ++k) out->d[k] += weight * g[2 * k] / ds_[k];
    for (int k = 0; k < K; ++k) {
      const double gs = weight * g[2 * k + 1];
      const double h = ys_[k + 1] - ys_[k];
      const double w = xs_[k + 1] - xs_[k];
      out->y[k + 1] += gs / h;
      out->y[k] -= gs / h;
      out->x[k + 1] -= gs / w;
      out->x[k] += gs / w;
    }
  }
  return total;
}

void backprop_to_raw(std::span<const double> raw, const SplineKnotGradient& kg,
                     std::span<double> raw_gradient) {
  const auto w = bin_widths(raw);
  const double g = kMinSlope + softplus(raw[kSlopeIndex]);

  // y_j = c - g B + sum_{i<j} g w_i e_i and d_k = g r_k.
  double total_y = 0.0;
  for (int j = 0; j <= K; ++j) total_y += kg.y[j];
  raw_gradient[kShiftIndex] += total_y;
  double grad_g = -kSplineBound * total_y;
  std::array<double, K> grad_w{};
  double suffix_y = 0.0;
  double suffix_x = 0.0;
  for (int i = K - 1; i >= 0; --i) {
    suffix_y += kg.y[i + 1];
    if (i + 1 < K) suffix_x += kg.x[i + 1];
    const double e = kMinHeight + softplus(raw[kHeightBegin + i]);
    grad_g += suffix_y * w[i] * e;
    grad_w[i] = suffix_x + suffix_y * g * e;
    raw_gradient[kHeightBegin + i] += suffix_y * g * w[i] * sigmoid(raw[kHeightBegin + i]);
  }
  for (int k = 0; k <= K; ++k) {
    const double r = kMinDerivative + softplus(raw[kDerivBegin + k]);
    grad_g += kg.d[k] * r;
    raw_gradient[kDerivBegin + k] += kg.d[k] * g * sigmoid(raw[kDerivBegin + k]);
  }
  raw_gradient[kSlopeIndex] += grad_g * sigmoid(raw[kSlopeIndex]);

  // Softmax widths; the widths sum to the fixed span so x_K never moves.
  const double width_scale = 2.0 * kSplineBound * (1.0 - K * kMinWidthFraction);
  double max_logit = raw[0];
  for (int k = 1; k < K; ++k) max_logit = std::max(max_logit, raw[k]);
  std::array<double, K> soft{};
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    soft[k] = std::exp(raw[k] - max_logit);
    total += soft[k];
  }
  double weighted = 0.0;
  for (int k = 0; k < K; ++k) {
    soft[k] /= total;
    weighted += soft[k] * grad_w[k];
  }
  for (int k = 0; k < K; ++k) raw_gradient[k] += width_scale * soft[k] * (grad_w[k] - weighted);
}

}  // namespace rhoflow
