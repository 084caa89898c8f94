#include "rhoflow/bayes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "rhoflow/copula.hpp"
#include "rhoflow/errors.hpp"

namespace rhoflow {

namespace {

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw DomainError("cannot parse " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::pair<double, double> parse_pair(std::string_view text, std::string_view what) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) {
    throw DomainError(std::string(what) + " needs two comma-separated values");
  }
  return {parse_number(text.substr(0, comma), what), parse_number(text.substr(comma + 1), what)};
}

double round_significant(double q) {
  if (q == 0.0 || !std::isfinite(q)) return q;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", q);
  return std::strtod(buf, nullptr);
}

void check_grid(std::span<const double> grid) {
  if (grid.size() < 2) throw DomainError("prior grid needs at least two points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= -1.0 && grid[i] <= 1.0)) {
      throw DomainError("prior grid values must lie in [-1, 1]");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw DomainError("prior grid must be strictly increasing");
    }
  }
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

RhoPrior RhoPrior::uniform() { return {Family::uniform, 0.0, 0.0}; }

RhoPrior RhoPrior::beta(double alpha, double beta) {
  if (!(alpha > 0.0 && beta > 0.0 && std::isfinite(alpha) && std::isfinite(beta))) {
    throw DomainError("beta prior parameters must be positive");
  }
  return {Family::beta, alpha, beta};
}

RhoPrior RhoPrior::truncated_normal(double mu, double sigma) {
  if (!std::isfinite(mu) || !(sigma > 0.0 && std::isfinite(sigma))) {
    throw DomainError("truncated normal prior needs finite mu and positive sigma");
  }
  const double mass = std_normal_cdf((1.0 - mu) / sigma) - std_normal_cdf((-1.0 - mu) / sigma);
  if (!(mass > 0.0)) throw DomainError("truncated normal prior has no mass on [-1, 1]");
  return {Family::truncated_normal, mu, sigma};
}

RhoPrior RhoPrior::parse(std::string_view spec) {
  if (spec == "uniform") return uniform();
  if (spec.starts_with("beta:")) {
    const auto [a, b] = parse_pair(spec.substr(5), "beta prior");
    return beta(a, b);
  }
  if (spec.starts_with("truncnorm:")) {
    const auto [mu, sigma] = parse_pair(spec.substr(10), "truncnorm prior");
    return truncated_normal(mu, sigma);
  }
  throw DomainError("unknown prior '" + std::string(spec) +
                    "' (expected uniform, beta:ALPHA,BETA or truncnorm:MU,SIGMA)");
}

std::string RhoPrior::to_string() const {
  // Shortest round-trip spelling so parse(to_string()) is exact.
  auto shortest = [](double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  switch (family_) {
    case Family::uniform:
      return "uniform";
    case Family::beta:
      return "beta:" + shortest(p1_) + ',' + shortest(p2_);
    case Family::truncated_normal:
      return "truncnorm:" + shortest(p1_) + ',' + shortest(p2_);
  }
  return {};
}

double RhoPrior::density(double rho) const {
  if (rho < -1.0 || rho > 1.0) return 0.0;
  switch (family_) {
    case Family::uniform:
      return 0.5;
    case Family::beta:
      return 0.5 * boost::math::ibeta_derivative(p1_, p2_, 0.5 * (rho + 1.0));
    case Family::truncated_normal: {
      const double mass = std_normal_cdf((1.0 - p1_) / p2_) - std_normal_cdf((-1.0 - p1_) / p2_);
      return normal_pdf((rho - p1_) / p2_) / (p2_ * mass);
    }
  }
  return 0.0;
}

double prior_cdf(const RhoPrior& prior, double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("prior CDF argument must lie in [-1, 1]");
  switch (prior.family()) {
    case RhoPrior::Family::uniform:
      return 0.5 * (rho + 1.0);
    case RhoPrior::Family::beta:
      return boost::math::ibeta(prior.first(), prior.second(), 0.5 * (rho + 1.0));
    case RhoPrior::Family::truncated_normal: {
      const double mu = prior.first();
      const double sigma = prior.second();
      const double lo = std_normal_cdf((-1.0 - mu) / sigma);
      const double hi = std_normal_cdf((1.0 - mu) / sigma);
      return std::clamp((std_normal_cdf((rho - mu) / sigma) - lo) / (hi - lo), 0.0, 1.0);
    }
  }
  return 0.0;
}

std::vector<double> discretize_prior(const RhoPrior& prior, std::span<const double> grid) {
  check_grid(grid);
  const std::size_t n = grid.size();
  std::vector<double> cut(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) cut[i] = prior_cdf(prior, 0.5 * (grid[i] + grid[i + 1]));
  std::vector<double> pmf(n);
  pmf[0] = cut[0];
  for (std::size_t i = 1; i + 1 < n; ++i) pmf[i] = cut[i] - cut[i - 1];
  pmf[n - 1] = 1.0 - cut[n - 2];
  return pmf;
}

void GridEvaluation::validate() const {
  if (grid.size() != q_values.size()) {
    throw DomainError("grid and q_values must have equal lengths");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("evaluation grid must be strictly increasing");
  }
  for (double q : q_values) {
    if (!std::isfinite(q)) throw NumericError("grid evaluation contains a non-finite value");
  }
}

double DiscretePosterior::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) m += support[i] * pmf[i];
  return m;
}

void DiscretePosterior::validate() const {
  if (support.empty() || support.size() != pmf.size()) {
    throw DomainError("posterior support and pmf must be non-empty and of equal length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (!(pmf[i] >= 0.0)) throw DomainError("posterior probabilities must be non-negative");
    if (i > 0 && !(support[i] > support[i - 1])) {
      throw DomainError("posterior support must be strictly increasing");
    }
    total += pmf[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("posterior probabilities must sum to 1");
}

DiscretePosterior posterior_q(const GridEvaluation& evaluation, std::span<const double> prior_pmf) {
  evaluation.validate();
  if (prior_pmf.size() != evaluation.grid.size()) {
    throw DomainError("prior pmf length does not match the grid");
  }
  std::map<double, double> mass;
  for (std::size_t i = 0; i < prior_pmf.size(); ++i) {
    mass[round_significant(evaluation.q_values[i])] += prior_pmf[i];
  }
  DiscretePosterior post;
  for (const auto& [q, p] : mass) {
    post.support.push_back(q);
    post.pmf.push_back(p);
  }
  return post;
}

double kernel_bandwidth(const DiscretePosterior& posterior) {
  const auto& s = posterior.support;
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(s.size());
  double var = 0.0;
  for (double v : s) var += (v - mean) * (v - mean);
  var /= static_cast<double>(s.size());
  if (var > 0.0) return std::sqrt(var / 16.0);
  return std::max(1e-6, 1e-3 * std::abs(mean));
}

std::vector<double> smooth_density(const DiscretePosterior& posterior,
                                   std::span<const double> eval_points) {
  const double b = kernel_bandwidth(posterior);
  std::vector<double> out;
  out.reserve(eval_points.size());
  for (double x : eval_points) {
    double f = 0.0;
    for (std::size_t i = 0; i < posterior.support.size(); ++i) {
      f += posterior.pmf[i] * normal_pdf((x - posterior.support[i]) / b);
    }
    out.push_back(f / b);
  }
  return out;
}

double smooth_cdf(const DiscretePosterior& posterior, double x) {
  const double b = kernel_bandwidth(posterior);
  double c = 0.0;
  for (std::size_t i = 0; i < posterior.support.size(); ++i) {
    c += posterior.pmf[i] * std_normal_cdf((x - posterior.support[i]) / b);
  }
  return c;
}

CredibleInterval credible_interval(const DiscretePosterior& posterior, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("credible level must lie in (0, 1)");
  posterior.validate();
  const double b = kernel_bandwidth(posterior);
  const double lo_bracket = posterior.support.front() - 40.0 * b;
  const double hi_bracket = posterior.support.back() + 40.0 * b;
  auto quantile = [&](double target) {
    double lo = lo_bracket;
    double hi = hi_bracket;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (smooth_cdf(posterior, mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double tail = 0.5 * (1.0 - level);
  return {level, quantile(tail), quantile(1.0 - tail)};
}

double prob_greater(const DiscretePosterior& posterior, double threshold) {
  double p = 0.0;
  for (std::size_t i = 0; i < posterior.support.size(); ++i) {
    if (posterior.support[i] > threshold) p += posterior.pmf[i];
  }
  return p;
}

std::vector<double> density_grid(const DiscretePosterior& posterior, std::size_t count) {
  if (count < 2) throw DomainError("density grid needs at least two points");
  const double b = kernel_bandwidth(posterior);
  const double lo = posterior.support.front() - 4.0 * b;
  const double hi = posterior.support.back() + 4.0 * b;
  std::vector<double> pts(count);
  for (std::size_t i = 0; i < count; ++i) {
    pts[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return pts;
}

}  // namespace rhoflow
