#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rhoflow/copula.hpp"
#include "rhoflow/errors.hpp"
#include "rhoflow/simgen.hpp"
#include "support.hpp"

using namespace rhoflow;

TEST(LinearScm, TableStats) {
  const double rho_p[] = {-0.55, -0.55, -0.55, 0.55, 0.55, 0.55};
  const double rho_t[] = {-0.71, -0.55, -0.32, 0.32, 0.55, 0.71};
  const double ace[] = {0.2, 0.0, -0.2, 0.2, 0.0, -0.2};
  for (int i = 1; i <= 6; ++i) {
    const auto s = linear_scm_stats(table1_scm(i));
    EXPECT_NEAR(s.rho_p_obs, rho_p[i - 1], 0.005) << i;
    EXPECT_NEAR(s.rho_true, rho_t[i - 1], 0.005) << i;
    EXPECT_DOUBLE_EQ(s.ace_true, ace[i - 1]) << i;
  }
  EXPECT_THROW(table1_scm(0), DomainError);
  EXPECT_THROW(table1_scm(7), DomainError);
}

TEST(LinearScm, UnconfoundedCase) {
  const LinearScmSpec spec{0.5, 0.0, 2.0};
  const auto s = linear_scm_stats(spec);
  EXPECT_DOUBLE_EQ(s.rho_true, 0.0);
  EXPECT_NEAR(s.rho_p_obs, 0.5 / std::sqrt(0.25 + 2.0), 1e-15);
}

TEST(LinearScm, RejectsNonPsdCovariance) {
  EXPECT_THROW(linear_scm_stats({0.0, 0.9, 0.5}), DomainError);
  EXPECT_THROW(sample_linear_scm({0.0, 0.9, 0.5}, 10, 1), DomainError);
  EXPECT_THROW(sample_linear_scm({0.0, 0.0, 0.0}, 10, 1), DomainError);
  EXPECT_THROW(sample_linear_scm(table1_scm(1), 0, 1), DomainError);
}

TEST(LinearScm, SampleMoments) {
  const auto d = sample_linear_scm(table1_scm(1), 50000, 7);
  ASSERT_EQ(d.size(), 50000u);
  EXPECT_NEAR(pearson(d.a, d.y), -0.55, 0.02);
  double m = 0.0;
  double v = 0.0;
  for (double a : d.a) m += a;
  m /= 50000.0;
  for (double a : d.a) v += (a - m) * (a - m);
  EXPECT_NEAR(v / 50000.0, 1.0, 0.02);

  const auto det = sample_linear_scm({1.0, 0.0, 1e-6}, 1000, 3);
  for (std::size_t i = 0; i < det.size(); ++i) EXPECT_NEAR(det.y[i], det.a[i], 0.01);

  const auto again = sample_linear_scm(table1_scm(1), 50000, 7);
  EXPECT_EQ(again.a, d.a);
  EXPECT_EQ(again.y, d.y);
}

TEST(BinaryScm, ReferenceAce) {
  BinaryScmSpec s;
  s.p_u = 0.5;
  s.p_a_given_u[0] = 0.2;
  s.p_a_given_u[1] = 0.8;
  const double py[4] = {0.1, 0.5, 0.4, 0.9};
  std::copy(py, py + 4, s.p_y_given_a_u);
  EXPECT_NEAR(binary_scm_ace(s), 0.35, 1e-15);

  BinaryScmSpec null;
  null.p_u = 0.3;
  const double same[4] = {0.2, 0.7, 0.2, 0.7};
  std::copy(same, same + 4, null.p_y_given_a_u);
  EXPECT_DOUBLE_EQ(binary_scm_ace(null), 0.0);

  s.p_y_given_a_u[3] = 1.2;
  EXPECT_THROW(binary_scm_ace(s), DomainError);
}

TEST(BinaryScm, AdjustmentFormulaMatchesEnumeration) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = random_binary_scm(seed);
    // E[Y | do(A=a)] = sum_u P(u) P(Y=1 | a, u), enumerated.
    double ey[2] = {0.0, 0.0};
    for (int a = 0; a < 2; ++a) {
      for (int u = 0; u < 2; ++u) {
        const double pu = u == 1 ? s.p_u : 1.0 - s.p_u;
        ey[a] += pu * s.p_y_given_a_u[2 * a + u];
      }
    }
    EXPECT_NEAR(binary_scm_ace(s), ey[1] - ey[0], 1e-15);
  }
}

TEST(BinaryScm, SampleMarginals) {
  const auto spec = random_binary_scm(11);
  const auto sample = sample_binary_scm(spec, 50000, 5);
  EXPECT_TRUE(sample.dataset.a_kind.is_binary());
  EXPECT_TRUE(sample.dataset.y_kind.is_binary());
  double pa = 0.0;
  for (double a : sample.dataset.a) pa += a;
  pa /= 50000.0;
  const double expected = spec.p_a_given_u[0] * (1 - spec.p_u) + spec.p_a_given_u[1] * spec.p_u;
  EXPECT_NEAR(pa, expected, 0.01);
  EXPECT_DOUBLE_EQ(sample.ace_true, binary_scm_ace(spec));
}

TEST(BinaryScm, SuiteIsReproducible) {
  for (std::size_t i = 0; i < 20; ++i) {
    const auto a = binary_suite_scm(kBinarySuiteSeed, i);
    const auto b = binary_suite_scm(kBinarySuiteSeed, i);
    EXPECT_EQ(a.p_u, b.p_u);
    EXPECT_EQ(a.p_y_given_a_u[3], b.p_y_given_a_u[3]);
  }
  EXPECT_NE(binary_suite_scm(kBinarySuiteSeed, 0).p_u, binary_suite_scm(kBinarySuiteSeed, 1).p_u);
}

TEST(EquivScm, Parameters) {
  for (double rho : {-0.9, 0.0, 0.4}) {
    const auto s = equiv_scm_params(rho, 1.0, 0.0);
    EXPECT_NEAR(s.lambda, 1.0, 1e-15);
    EXPECT_NEAR(s.tau, 1.0, 1e-15);
  }
  const auto z = equiv_scm_params(0.0, -3.0, 7.0);
  EXPECT_NEAR(z.tau, 1.0, 1e-15);
  const auto s = equiv_scm_params(0.5, 2.0, 1.0);
  EXPECT_NEAR(s.lambda, std::sqrt(5.0) / 2.0, 1e-15);
  EXPECT_NEAR(s.tau, std::sqrt(11.0 / 12.0), 1e-15);

  EXPECT_THROW(equiv_scm_params(0.5, 0.0, 0.0), DomainError);
  EXPECT_THROW(equiv_scm_params(1.0, 1.0, 0.0), DomainError);
  // Bound at rho = 0.5, gamma = 1 is sqrt(3).
  EXPECT_NO_THROW(equiv_scm_params(0.5, 1.0, 1.7));
  EXPECT_THROW(equiv_scm_params(0.5, 1.0, 1.8), DomainError);
}

TEST(EquivScm, DegenerateMixingGivesUAsTreatmentScore) {
  const auto s = equiv_scm_params(0.3, 1.0, 0.0);
  for (double u : {-1.2, 0.0, 2.5}) {
    EXPECT_DOUBLE_EQ(equiv_latent(s, u, 0.7, -0.4).z_a, u);
  }
}

TEST(EquivScm, LatentMomentsAndObservationalEquivalence) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 5; ++t) {
    const auto spec = checks::random_equiv_spec(rng);
    const auto c = checks::check_equivalence(spec, 100 + t, 100000);
    EXPECT_NEAR(c.moments.mean_a, 0.0, 0.02);
    EXPECT_NEAR(c.moments.mean_y, 0.0, 0.02);
    EXPECT_NEAR(c.moments.var_a, 1.0, 0.03);
    EXPECT_NEAR(c.moments.var_y, 1.0, 0.03);
    EXPECT_NEAR(c.moments.corr, spec.rho, 0.02);
    EXPECT_LT(c.ks_a, 0.02);
    EXPECT_LT(c.ks_y, 0.02);
  }
}

TEST(EquivScm, InfluenceSigns) {
  auto signs = [](double rho, double gamma) {
    return influence_signs(equiv_scm_params(rho, gamma, 0.0));
  };
  EXPECT_EQ(signs(0.5, 1.0).on_treatment, 1);
  EXPECT_EQ(signs(0.5, 1.0).on_outcome, 1);
  EXPECT_EQ(signs(0.5, -1.0).on_treatment, -1);
  EXPECT_EQ(signs(0.5, -1.0).on_outcome, -1);
  EXPECT_EQ(signs(-0.5, 1.0).on_treatment, 1);
  EXPECT_EQ(signs(-0.5, 1.0).on_outcome, -1);
  EXPECT_THROW(signs(0.0, 1.0), DomainError);

  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const auto spec = checks::random_equiv_spec(rng);
    const auto s = influence_signs(spec);
    EXPECT_EQ(s.on_treatment * s.on_outcome, spec.rho > 0 ? 1 : -1);
  }
}

TEST(EquivScm, FiniteDifferenceSignsMatch) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 3; ++t) {
    const auto spec = checks::random_equiv_spec(rng);
    const auto c = checks::check_influence_signs(spec, 300 + t, 1000);
    EXPECT_EQ(c.mismatches, 0u);
  }
}
