#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace rhoflow {

/// Monotone rational-quadratic spline with linear tails.
///
/// The spline has kSplineBins bins whose input knots span
/// [-kSplineBound, kSplineBound]. Outside that range it extrapolates linearly
/// with the boundary derivative, so the map is C1 and strictly increasing on
/// the whole real line and its inverse is closed-form.
///
/// Unconstrained ("raw") parameters, kSplineParamCount of them, are laid out as
///   [0, K)        bin-width logits (softmax, with a minimum width)
///   [K]           output shift c
///   [K+1]         global slope g (softplus, with a minimum)
///   [K+2, 2K+2)   relative bin slopes e_k (softplus, with a minimum)
///   [2K+2, 3K+3)  relative knot derivatives (softplus, with a minimum)
/// giving bin heights h_k = g e_k w_k, knot derivatives g * rel_k and a first
/// output knot at c - g * bound. With every relative quantity at 1 the spline
/// is the affine map x -> g x + c, so bins that see no data keep slope g.
inline constexpr int kSplineBins = 8;
inline constexpr double kSplineBound = 4.0;
inline constexpr std::size_t kSplineParamCount = 3 * kSplineBins + 3;

using SplineRaw = std::array<double, kSplineParamCount>;
using SplineKnots = std::array<double, kSplineBins + 1>;

/// Raw parameters of the identity map.
SplineRaw identity_spline_raw();

/// Accumulated loss gradient with respect to the constrained knots.
struct SplineKnotGradient {
  SplineKnots x{};
  SplineKnots y{};
  SplineKnots d{};
};

class MonotoneTransformer {
 public:
  struct Value {
    double value;
    double log_derivative;
  };

  /// Builds the constrained spline from raw parameters.
  static MonotoneTransformer from_raw(std::span<const double> raw);
  static MonotoneTransformer identity() { return from_raw(identity_spline_raw()); }

  double operator()(double x) const { return evaluate(x).value; }
  Value evaluate(double x) const;
  double derivative(double x) const;
  double inverse(double y) const;

  /// Adds d(loss)/d(knots) for one evaluation at x, given the upstream
  /// gradients of the loss with respect to the output and its log-derivative.
  void accumulate_gradient(double x, double grad_value, double grad_log_derivative,
                           SplineKnotGradient& out) const;

  /// Sum of squared differences between neighbouring log-slopes along
  /// d_0, s_0, d_1, s_1, ..., d_K (s_k is the secant slope of bin k). Zero
  /// exactly when the spline is affine. If out is given, weight times the
  /// gradient is added to it.
  double roughness(SplineKnotGradient* out = nullptr, double weight = 1.0) const;

  const SplineKnots& knot_positions() const noexcept { return xs_; }
  const SplineKnots& knot_values() const noexcept { return ys_; }
  const SplineKnots& knot_derivatives() const noexcept { return ds_; }

 private:
  int bin_of_input(double x) const;

  SplineKnots xs_{};
  SplineKnots ys_{};
  SplineKnots ds_{};
};

/// Chains a knot gradient back through the constraint map, adding the result
/// to raw_gradient (length kSplineParamCount).
void backprop_to_raw(std::span<const double> raw, const SplineKnotGradient& knot_gradient,
                     std::span<double> raw_gradient);

}  // namespace rhoflow
