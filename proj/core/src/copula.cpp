#include "rhoflow/copula.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "rhoflow/errors.hpp"
#include "rhoflow/rng.hpp"

namespace rhoflow {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

}  // namespace

CopulaCorrelation::CopulaCorrelation(double rho) : rho_(rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) {
    std::ostringstream os;
    os << "copula correlation must lie in [-1, 1], got " << rho;
    throw DomainError(os.str());
  }
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0); }

double std_normal_logpdf(double z) { return -0.5 * (kLogTwoPi + z * z); }

double std_normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    std::ostringstream os;
    os << "normal quantile requires 0 < u < 1, got " << u;
    throw DomainError(os.str());
  }
  const double q = u - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? u : 1.0 - u;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r +
                  0.24178072517745061177) * r + 1.27045825245236838258) * r +
                3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734) /
            (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r +
                  0.0151986665636164571966) * r + 0.14810397642748007459) * r +
                0.68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r +
                  0.0012426609473880784386) * r + 0.026532189526576123093) * r +
                0.29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772) /
            (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r +
                  1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
                0.0148753612908506148525) * r + 0.13692988092273580531) * r +
              0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

double bivariate_normal_logpdf(GaussianPair pair, CopulaCorrelation rho) {
  if (rho.is_degenerate()) {
    throw DomainError("bivariate normal density is degenerate at |rho| = 1");
  }
  const double r = rho.value();
  const double one_minus = 1.0 - r * r;
  const double quad = pair.z_a * pair.z_a - 2.0 * r * pair.z_a * pair.z_y + pair.z_y * pair.z_y;
  return -kLogTwoPi - 0.5 * std::log(one_minus) - quad / (2.0 * one_minus);
}

GaussianPair bivariate_normal_logpdf_gradient(GaussianPair pair, CopulaCorrelation rho) {
  if (rho.is_degenerate()) {
    throw DomainError("bivariate normal density is degenerate at |rho| = 1");
  }
  const double r = rho.value();
  const double one_minus = 1.0 - r * r;
  return {-(pair.z_a - r * pair.z_y) / one_minus, -(pair.z_y - r * pair.z_a) / one_minus};
}

std::vector<GaussianPair> sample_bivariate(CopulaCorrelation rho, std::size_t n,
                                           std::uint64_t seed) {
  NormalSource normal(seed);
  const double r = rho.value();
  const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
  std::vector<GaussianPair> out(n);
  for (auto& p : out) {
    p.z_a = normal();
    p.z_y = r * p.z_a + s * normal();
  }
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DataError("correlation needs two equal-length samples of size >= 2");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DataError("correlation is undefined for a constant variable");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 share the average of ranks i+1..j
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> y) {
  if (a.size() != y.size() || a.size() < 2) {
    throw DataError("spearman needs two equal-length samples of size >= 2");
  }
  const auto ra = average_ranks(a);
  const auto ry = average_ranks(y);
  return pearson(ra, ry);
}

CopulaCorrelation pearson_from_spearman(double rho_s) {
  if (!(rho_s >= -1.0 && rho_s <= 1.0)) {
    throw DomainError("spearman correlation must lie in [-1, 1]");
  }
  return CopulaCorrelation(std::clamp(2.0 * std::sin(std::numbers::pi * rho_s / 6.0), -1.0, 1.0));
}

}  // namespace rhoflow
