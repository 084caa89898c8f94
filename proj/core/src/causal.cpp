#include "rhoflow/causal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rhoflow/copula.hpp"
#include "rhoflow/errors.hpp"

namespace rhoflow {

namespace {

void check_schema(const RhoGnfModel& model, const ObservationalDataset& dataset) {
  if (!(model.a_kind() == dataset.a_kind) || !(model.y_kind() == dataset.y_kind)) {
    throw DataError("dataset schema (" + dataset.a_kind.to_string() + ", " +
                    dataset.y_kind.to_string() + ") does not match the model (" +
                    model.a_kind().to_string() + ", " + model.y_kind().to_string() + ")");
  }
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double mean(std::span<const int> v) {
  double s = 0.0;
  for (int x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> recover_noise(const RhoGnfModel& model, const ObservationalDataset& dataset,
                                  std::uint64_t seed) {
  check_schema(model, dataset);
  if (dataset.size() == 0) throw DataError("dataset is empty");
  const auto cols = dequantized_columns(dataset, model.dequant_sigma(), seed);
  const auto splines = model.outcome_splines(cols.a);
  const auto& sy = model.y_standardizer();
  std::vector<double> z(dataset.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = splines[i](sy.apply(cols.y[i]));
  return z;
}

PotentialOutcomes potential_outcomes(const RhoGnfModel& model, std::span<const double> z_y,
                                     double a) {
  const auto spline = model.outcome_spline(a);
  const auto& sy = model.y_standardizer();
  PotentialOutcomes out;
  out.values.resize(z_y.size());
  for (std::size_t i = 0; i < z_y.size(); ++i) out.values[i] = sy.invert(spline.inverse(z_y[i]));
  if (model.y_kind().is_discrete()) {
    out.categories.resize(z_y.size());
    for (std::size_t i = 0; i < z_y.size(); ++i) {
      out.categories[i] = quantize(out.values[i], model.y_kind());
    }
  }
  return out;
}

AceEstimate estimate_ace(const RhoGnfModel& model, const ObservationalDataset& dataset,
                         TreatmentLevels levels, std::uint64_t seed) {
  if (levels.treated == levels.control) {
    throw DomainError("treated and control levels must differ");
  }
  const auto z = recover_noise(model, dataset, seed);
  const auto y1 = potential_outcomes(model, z, levels.treated);
  const auto y0 = potential_outcomes(model, z, levels.control);
  AceEstimate est;
  est.mean_y1 = mean(y1.values);
  est.mean_y0 = mean(y0.values);
  est.ace = est.mean_y1 - est.mean_y0;
  if (!y1.categories.empty()) {
    est.quantized_ace = mean(y1.categories) - mean(y0.categories);
  }
  return est;
}

std::vector<double> RhoCurve::grid() const {
  std::vector<double> g;
  for (const auto& p : points) g.push_back(p.rho);
  return g;
}

std::vector<double> RhoCurve::aces() const {
  std::vector<double> g;
  for (const auto& p : points) g.push_back(p.ace);
  return g;
}

double RhoCurve::ace_at(double rho) const {
  if (points.empty()) throw DomainError("curve is empty");
  if (rho < points.front().rho || rho > points.back().rho) {
    std::ostringstream os;
    os << "rho " << rho << " lies outside the curve grid [" << points.front().rho << ", "
       << points.back().rho << "]";
    throw DomainError(os.str());
  }
  if (points.size() == 1) return points.front().ace;
  const auto it = std::upper_bound(points.begin(), points.end(), rho,
                                   [](double r, const CurvePoint& p) { return r < p.rho; });
  if (it == points.end()) return points.back().ace;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (rho - lo.rho) / (hi.rho - lo.rho);
  return lo.ace + t * (hi.ace - lo.ace);
}

RhoCurve curve_from_fits(const ObservationalDataset& dataset, std::span<const GridFit> fits,
                         TreatmentLevels levels) {
  if (fits.empty()) throw DomainError("no fitted grid points");
  RhoCurve curve;
  for (const auto& f : fits) {
    const auto est = estimate_ace(f.model, dataset, levels, f.seed);
    curve.points.push_back({f.rho.value(), est.ace, est.mean_y1, est.mean_y0, est.quantized_ace,
                            f.seed});
  }
  std::sort(curve.points.begin(), curve.points.end(),
            [](const CurvePoint& x, const CurvePoint& y) { return x.rho < y.rho; });
  const auto [lo, hi] = std::minmax_element(
      curve.points.begin(), curve.points.end(),
      [](const CurvePoint& x, const CurvePoint& y) { return x.ace < y.ace; });
  curve.inf_ace = lo->ace;
  curve.sup_ace = hi->ace;
  curve.rho_value = rho_value(dataset);
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    const auto& q = curve.points[i + 1];
    if (p.ace == 0.0) {
      curve.crossing_rho = p.rho;
      break;
    }
    if ((p.ace < 0.0) != (q.ace < 0.0)) {
      curve.crossing_rho = p.rho + (q.rho - p.rho) * p.ace / (p.ace - q.ace);
      break;
    }
  }
  if (dataset.a_kind.is_binary() && dataset.y_kind.is_binary()) {
    curve.af_bounds = af_bounds(dataset);
  }
  return curve;
}

RhoCurve rho_curve(const ObservationalDataset& dataset, std::span<const double> grid,
                   const TrainConfig& config, TreatmentLevels levels, unsigned jobs) {
  const auto fits = fit_grid(dataset, grid, config, jobs);
  return curve_from_fits(dataset, fits, levels);
}

double rho_value(const ObservationalDataset& dataset) {
  return pearson_from_spearman(spearman(dataset.a, dataset.y)).value();
}

AfBounds af_bounds(std::span<const double> a, std::span<const double> y) {
  if (a.size() != y.size()) throw DataError("treatment and outcome columns differ in length");
  double n1 = 0.0, n0 = 0.0, y1 = 0.0, y0 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] != 0.0 && a[i] != 1.0) || (y[i] != 0.0 && y[i] != 1.0)) {
      throw DataError("assumption-free bounds need binary treatment and outcome");
    }
    if (a[i] == 1.0) {
      n1 += 1.0;
      y1 += y[i];
    } else {
      n0 += 1.0;
      y0 += y[i];
    }
  }
  if (n1 == 0.0 || n0 == 0.0) throw DataError("a treatment arm is empty");
  const double p1 = n1 / (n1 + n0);
  const double p0 = 1.0 - p1;
  const double q1 = y1 / n1;
  const double q0 = y0 / n0;
  const double center = q1 * p1 - q0 * p0;
  return {center - p1, center + p0};
}

AfBounds af_bounds(const ObservationalDataset& dataset) {
  if (!dataset.a_kind.is_binary() || !dataset.y_kind.is_binary()) {
    throw DataError("assumption-free bounds need binary treatment and outcome");
  }
  return af_bounds(dataset.a, dataset.y);
}

AfBounds af_bounds_sum(std::span<const double> a,
                       std::span<const std::vector<double>> indicators) {
  if (indicators.empty()) throw DataError("no outcome indicators given");
  AfBounds total;
  for (const auto& column : indicators) {
    const auto b = af_bounds(a, column);
    total.lower += b.lower;
    total.upper += b.upper;
  }
  return total;
}

std::pair<double, double> ace_interval(const RhoCurve& curve, double rho_min, double rho_max) {
  if (!(rho_min <= rho_max)) throw DomainError("rho_min must not exceed rho_max");
  double lo = curve.ace_at(rho_min);
  double hi = curve.ace_at(rho_max);
  if (lo > hi) std::swap(lo, hi);
  for (const auto& p : curve.points) {
    if (p.rho > rho_min && p.rho < rho_max) {
      lo = std::min(lo, p.ace);
      hi = std::max(hi, p.ace);
    }
  }
  return {lo, hi};
}

}  // namespace rhoflow
