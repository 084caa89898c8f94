#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rhoflow/causal.hpp"
#include "rhoflow/copula.hpp"
#include "rhoflow/errors.hpp"
#include "rhoflow/simgen.hpp"

using namespace rhoflow;

namespace {

// n1 treated with y1 successes, n0 controls with y0 successes.
ObservationalDataset binary_data(int n1, int y1, int n0, int y0) {
  ObservationalDataset d;
  d.a_kind = VariableKind::binary();
  d.y_kind = VariableKind::binary();
  for (int i = 0; i < n1; ++i) {
    d.a.push_back(1);
    d.y.push_back(i < y1 ? 1 : 0);
  }
  for (int i = 0; i < n0; ++i) {
    d.a.push_back(0);
    d.y.push_back(i < y0 ? 1 : 0);
  }
  return d;
}

RhoCurve make_curve(std::vector<double> grid, std::vector<double> aces) {
  RhoCurve c;
  for (std::size_t i = 0; i < grid.size(); ++i) c.points.push_back({grid[i], aces[i], 0.0, 0.0, std::nullopt, 0});
  c.inf_ace = *std::min_element(aces.begin(), aces.end());
  c.sup_ace = *std::max_element(aces.begin(), aces.end());
  return c;
}

double ks_vs_normal(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = std_normal_cdf(z[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace

TEST(AfBounds, ReferenceExamples) {
  const auto sym = af_bounds(binary_data(50, 25, 50, 25));
  EXPECT_NEAR(sym.lower, -0.5, 1e-15);
  EXPECT_NEAR(sym.upper, 0.5, 1e-15);
  const auto b = af_bounds(binary_data(40, 28, 60, 18));
  EXPECT_NEAR(b.lower, -0.30, 1e-14);
  EXPECT_NEAR(b.upper, 0.70, 1e-14);
}

TEST(AfBounds, WidthIsAlwaysOne) {
  for (int n1 = 1; n1 < 30; n1 += 3) {
    for (int y1 = 0; y1 <= n1; y1 += 2) {
      const auto b = af_bounds(binary_data(n1, y1, 17, 5));
      EXPECT_NEAR(b.upper - b.lower, 1.0, 1e-14);
    }
  }
}

TEST(AfBounds, Errors) {
  EXPECT_THROW(af_bounds(binary_data(10, 3, 0, 0)), DataError);
  EXPECT_THROW(af_bounds(binary_data(0, 0, 10, 3)), DataError);
  auto d = binary_data(10, 3, 10, 3);
  d.y_kind = VariableKind::continuous();
  EXPECT_THROW(af_bounds(d), DataError);
  const std::vector<double> a{0, 1, 2};
  const std::vector<double> y{0, 1, 1};
  EXPECT_THROW(af_bounds(a, y), DataError);
}

TEST(AfBounds, SumOfIndicators) {
  const auto d = binary_data(40, 28, 60, 18);
  const std::vector<std::vector<double>> one{d.y};
  const auto b1 = af_bounds_sum(d.a, one);
  const auto ref = af_bounds(d);
  EXPECT_DOUBLE_EQ(b1.lower, ref.lower);
  EXPECT_DOUBLE_EQ(b1.upper, ref.upper);
  const std::vector<std::vector<double>> two{d.y, d.y};
  const auto b2 = af_bounds_sum(d.a, two);
  EXPECT_NEAR(b2.lower, -0.60, 1e-14);
  EXPECT_NEAR(b2.upper, 1.40, 1e-14);
  std::vector<std::vector<double>> seven(7, d.y);
  for (std::size_t k = 0; k < 7; ++k) {
    for (std::size_t i = 0; i < k; ++i) seven[k][i] = 1.0 - seven[k][i];
  }
  const auto b7 = af_bounds_sum(d.a, seven);
  EXPECT_NEAR(b7.upper - b7.lower, 7.0, 1e-13);
  EXPECT_THROW(af_bounds_sum(d.a, std::vector<std::vector<double>>{}), DataError);
}

TEST(RhoValue, TableDatasets) {
  EXPECT_NEAR(rho_value(sample_linear_scm(table1_scm(1), 50000, 3)), -0.55, 0.01);
  EXPECT_NEAR(rho_value(sample_linear_scm(table1_scm(4), 50000, 4)), 0.55, 0.01);
  const auto ind = sample_linear_scm({0.0, 0.0, 1.0}, 50000, 5);
  EXPECT_LT(std::abs(rho_value(ind)), 3.0 / std::sqrt(50000.0));
}

TEST(RhoValue, InvariantUnderMonotoneTransforms) {
  auto d = sample_linear_scm(table1_scm(2), 5000, 9);
  const double r = rho_value(d);
  for (auto& a : d.a) a = std::exp(a);
  for (auto& y : d.y) y = y * y * y + 2.0 * y;
  EXPECT_DOUBLE_EQ(rho_value(d), r);
}

TEST(Curve, InterpolationAndInterval) {
  const auto c = make_curve({-0.5, 0.0, 0.5}, {1.0, 0.0, -2.0});
  EXPECT_DOUBLE_EQ(c.ace_at(-0.25), 0.5);
  EXPECT_DOUBLE_EQ(c.ace_at(0.5), -2.0);
  EXPECT_THROW(c.ace_at(0.6), DomainError);
  EXPECT_THROW(c.ace_at(-0.51), DomainError);

  const auto full = ace_interval(c, -0.5, 0.5);
  EXPECT_DOUBLE_EQ(full.first, c.inf_ace);
  EXPECT_DOUBLE_EQ(full.second, c.sup_ace);
  const auto point = ace_interval(c, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(point.first, 0.0);
  EXPECT_DOUBLE_EQ(point.second, 0.0);
  const auto part = ace_interval(c, -0.25, 0.25);
  EXPECT_DOUBLE_EQ(part.first, -1.0);
  EXPECT_DOUBLE_EQ(part.second, 0.5);
  EXPECT_THROW(ace_interval(c, 0.3, 0.2), DomainError);
  EXPECT_THROW(ace_interval(c, -0.7, 0.2), DomainError);
}

TEST(Curve, SignLogicOnDecreasingCurve) {
  // Decreasing curve crossing zero at rho_value = -0.1.
  std::vector<double> grid;
  std::vector<double> aces;
  for (double r = -0.99; r <= 0.991; r += 0.11) {
    grid.push_back(r);
    aces.push_back(-2.0 * (r + 0.1));
  }
  const auto c = make_curve(grid, aces);
  const auto [lo, hi] = ace_interval(c, 0.0, 0.5);
  EXPECT_LT(hi, 0.0);
  EXPECT_LT(lo, hi);
}

TEST(Estimator, IdentityModelGivesZero) {
  const auto d = sample_linear_scm(table1_scm(1), 500, 1);
  RhoGnfModel model(CopulaCorrelation(0.3), d.a_kind, d.y_kind);
  const auto z = recover_noise(model, d, 0);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(z[i], d.y[i], 1e-12);
  const auto y1 = potential_outcomes(model, z, 1.0);
  const auto y0 = potential_outcomes(model, z, 0.0);
  EXPECT_EQ(y1.values, y0.values);
  EXPECT_TRUE(y1.categories.empty());
  const auto est = estimate_ace(model, d, {}, 0);
  EXPECT_DOUBLE_EQ(est.ace, 0.0);
  EXPECT_FALSE(est.quantized_ace.has_value());
  EXPECT_THROW(estimate_ace(model, d, {1.0, 1.0}, 0), DomainError);
}

TEST(Estimator, DiscreteOutcomesAreDequantized) {
  const auto d = binary_data(40, 28, 60, 18);
  RhoGnfModel model(CopulaCorrelation(0.0), d.a_kind, d.y_kind);
  const auto z = recover_noise(model, d, 4);
  const auto po = potential_outcomes(model, z, 1.0);
  ASSERT_EQ(po.categories.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_NE(z[i], d.y[i]);
    EXPECT_EQ(po.categories[i], quantize(po.values[i], d.y_kind));
  }
  const auto est = estimate_ace(model, d, {}, 4);
  ASSERT_TRUE(est.quantized_ace.has_value());
  EXPECT_DOUBLE_EQ(*est.quantized_ace, 0.0);

  RhoGnfModel mismatch(CopulaCorrelation(0.0), VariableKind::continuous(), d.y_kind);
  EXPECT_THROW(recover_noise(mismatch, d, 0), DataError);
}

TEST(Estimator, MonotoneInNoise) {
  const auto d = sample_linear_scm(table1_scm(1), 200, 1);
  RhoGnfModel model(CopulaCorrelation(0.0), d.a_kind, d.y_kind, {4}, 3);
  std::vector<double> p(model.parameters().begin(), model.parameters().end());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += 0.3 * std::sin(1.0 + static_cast<double>(i));
  model.set_parameters(p);
  std::vector<double> z;
  for (double v = -5.0; v <= 5.0; v += 0.05) z.push_back(v);
  const auto po = potential_outcomes(model, z, 0.7);
  for (std::size_t i = 1; i < z.size(); ++i) EXPECT_GT(po.values[i], po.values[i - 1]);
}

TEST(Estimator, TrainedLinearModel) {
  // SCM_4: alpha = 0.2, rho_true = 0.32.
  const auto spec = table1_scm(4);
  const auto d = sample_linear_scm(spec, 20000, 41);
  TrainConfig config;
  config.seed = 5;
  config.max_epochs = 60;
  const double rho_true = linear_scm_stats(spec).rho_true;
  const auto fit_result = fit(d, CopulaCorrelation(rho_true), config);
  const auto& model = fit_result.model;

  const auto est = estimate_ace(model, d, {}, config.seed);
  EXPECT_NEAR(est.ace, 0.2, 0.05);

  const auto z = recover_noise(model, d, config.seed);
  EXPECT_LT(ks_vs_normal(z), 0.02);

  // Per-sample effects: Y_1 - Y_0 is close to alpha for typical noises.
  const auto y1 = potential_outcomes(model, z, 1.0);
  const auto y0 = potential_outcomes(model, z, 0.0);
  std::vector<double> diff;
  for (std::size_t i = 0; i < z.size(); ++i) diff.push_back(y1.values[i] - y0.values[i]);
  std::nth_element(diff.begin(), diff.begin() + diff.size() / 2, diff.end());
  EXPECT_NEAR(diff[diff.size() / 2], 0.2, 0.05);

  EXPECT_NE(inverse(model, {0.0, 0.0}, 0.0).y, inverse(model, {0.0, 0.0}, 1.0).y);
}
