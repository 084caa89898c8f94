#include "rhoflow/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "rhoflow/errors.hpp"

namespace rhoflow {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

// Maps data coordinates to the plotting area.
class Frame {
 public:
  Frame(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    if (!(x1_ > x0_)) x1_ = x0_ + 1.0;
    if (!(y1_ > y0_)) {
      y0_ -= 0.5;
      y1_ += 0.5;
    }
  }
  double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    return kHeight - kBottom - (y - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom);
  }
  double x0() const { return x0_; }
  double x1() const { return x1_; }
  double y0() const { return y0_; }
  double y1() const { return y1_; }

 private:
  double x0_, x1_, y0_, y1_;
};

void open_svg(std::ostringstream& os, const std::string& title) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" "
     << "font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << title << "</text>\n";
}

void axes(std::ostringstream& os, const Frame& f, const std::string& xlabel,
          const std::string& ylabel) {
  const double bx = kHeight - kBottom;
  os << "<g stroke=\"black\" stroke-width=\"1\">\n"
     << "<line x1=\"" << kLeft << "\" y1=\"" << bx << "\" x2=\"" << kWidth - kRight << "\" y2=\""
     << bx << "\"/>\n"
     << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << bx
     << "\"/>\n</g>\n";
  os << "<g font-size=\"10\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = f.x0() + (f.x1() - f.x0()) * i / 4.0;
    const double y = f.y0() + (f.y1() - f.y0()) * i / 4.0;
    os << "<line x1=\"" << num(f.px(x)) << "\" y1=\"" << bx << "\" x2=\"" << num(f.px(x))
       << "\" y2=\"" << bx + 4 << "\" stroke=\"black\"/>"
       << "<text x=\"" << num(f.px(x)) << "\" y=\"" << bx + 16 << "\" text-anchor=\"middle\">"
       << tick_label(x) << "</text>\n"
       << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << num(f.py(y)) << "\" x2=\"" << kLeft
       << "\" y2=\"" << num(f.py(y)) << "\" stroke=\"black\"/>"
       << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(f.py(y) + 3)
       << "\" text-anchor=\"end\">" << tick_label(y) << "</text>\n";
  }
  os << "</g>\n"
     << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
     << "\" text-anchor=\"middle\">" << xlabel << "</text>\n"
     << "<text x=\"16\" y=\"" << (kTop + bx) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (kTop + bx) / 2 << ")\">" << ylabel << "</text>\n";
}

void hline(std::ostringstream& os, const Frame& f, double y, const std::string& colour,
           const std::string& dash, const std::string& label) {
  os << "<line x1=\"" << kLeft << "\" y1=\"" << num(f.py(y)) << "\" x2=\"" << kWidth - kRight
     << "\" y2=\"" << num(f.py(y)) << "\" stroke=\"" << colour << "\" stroke-dasharray=\"" << dash
     << "\"/>\n<text x=\"" << kWidth - kRight - 4 << "\" y=\"" << num(f.py(y) - 4)
     << "\" text-anchor=\"end\" fill=\"" << colour << "\" font-size=\"10\">" << label
     << "</text>\n";
}

std::string polyline(const Frame& f, const std::vector<double>& xs, const std::vector<double>& ys) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ' ';
    os << num(f.px(xs[i])) << ',' << num(f.py(ys[i]));
  }
  return os.str();
}

}  // namespace

std::string curve_svg(const RhoCurve& curve) {
  if (curve.points.empty()) throw DomainError("cannot plot an empty curve");
  const auto xs = curve.grid();
  const auto ys = curve.aces();
  double lo = std::min(0.0, curve.inf_ace);
  double hi = std::max(0.0, curve.sup_ace);
  if (curve.af_bounds) {
    lo = std::min(lo, curve.af_bounds->lower);
    hi = std::max(hi, curve.af_bounds->upper);
  }
  const double pad = 0.05 * (hi - lo);
  const Frame f(std::min(-1.0, xs.front()), std::max(1.0, xs.back()), lo - pad, hi + pad);

  std::ostringstream os;
  open_svg(os, "ACE as a function of the copula correlation");
  axes(os, f, "rho", "ACE");
  os << "<line x1=\"" << kLeft << "\" y1=\"" << num(f.py(0)) << "\" x2=\"" << kWidth - kRight
     << "\" y2=\"" << num(f.py(0)) << "\" stroke=\"#999\"/>\n";
  hline(os, f, curve.inf_ace, "#1f77b4", "4 3", "inf ACE");
  hline(os, f, curve.sup_ace, "#1f77b4", "4 3", "sup ACE");
  if (curve.af_bounds) {
    hline(os, f, curve.af_bounds->lower, "#d62728", "1 3", "AF lower");
    hline(os, f, curve.af_bounds->upper, "#d62728", "1 3", "AF upper");
  }
  os << "<polyline id=\"curve\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\""
     << polyline(f, xs, ys) << "\"/>\n<g fill=\"black\">\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    os << "<circle cx=\"" << num(f.px(xs[i])) << "\" cy=\"" << num(f.py(ys[i])) << "\" r=\"3\"/>\n";
  }
  os << "</g>\n";
  const double rv = std::clamp(curve.rho_value, f.x0(), f.x1());
  os << "<g id=\"rho-value\" stroke=\"#2ca02c\">\n<line x1=\"" << num(f.px(rv)) << "\" y1=\""
     << kTop << "\" x2=\"" << num(f.px(rv)) << "\" y2=\"" << kHeight - kBottom
     << "\" stroke-dasharray=\"6 3\"/>\n<circle cx=\"" << num(f.px(rv)) << "\" cy=\""
     << num(f.py(0)) << "\" r=\"5\" fill=\"none\" stroke-width=\"2\"/>\n</g>\n"
     << "<text x=\"" << num(f.px(rv) + 6) << "\" y=\"" << kTop + 12
     << "\" fill=\"#2ca02c\" font-size=\"10\">rho-value " << tick_label(curve.rho_value)
     << "</text>\n</svg>\n";
  return os.str();
}

std::string posterior_svg(const PosteriorSummary& s) {
  const auto xs = density_grid(s.posterior);
  const auto ys = smooth_density(s.posterior, xs);
  const double top = *std::max_element(ys.begin(), ys.end());
  const Frame f(xs.front(), xs.back(), 0.0, 1.1 * top);

  std::ostringstream os;
  open_svg(os, "Posterior of " + s.quantity + " (prior " + s.prior + ")");
  axes(os, f, s.quantity, "density");

  std::vector<double> sx, sy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] >= s.interval.lo && xs[i] <= s.interval.hi) {
      sx.push_back(xs[i]);
      sy.push_back(ys[i]);
    }
  }
  const auto lo_d = smooth_density(s.posterior, std::vector<double>{s.interval.lo, s.interval.hi});
  sx.insert(sx.begin(), s.interval.lo);
  sy.insert(sy.begin(), lo_d[0]);
  sx.push_back(s.interval.hi);
  sy.push_back(lo_d[1]);
  sx.push_back(s.interval.hi);
  sy.push_back(0.0);
  sx.push_back(s.interval.lo);
  sy.push_back(0.0);
  os << "<polygon id=\"credible-interval\" fill=\"#9ecae1\" fill-opacity=\"0.6\" points=\""
     << polyline(f, sx, sy) << "\"/>\n";
  const double stem_scale = 0.9 * f.y1();
  double max_p = *std::max_element(s.posterior.pmf.begin(), s.posterior.pmf.end());
  if (!(max_p > 0.0)) max_p = 1.0;
  os << "<g stroke=\"#ff7f0e\" stroke-width=\"1\">\n";
  for (std::size_t i = 0; i < s.posterior.support.size(); ++i) {
    const double x = f.px(s.posterior.support[i]);
    os << "<line x1=\"" << num(x) << "\" y1=\"" << num(f.py(0)) << "\" x2=\"" << num(x)
       << "\" y2=\"" << num(f.py(stem_scale * s.posterior.pmf[i] / max_p)) << "\"/>\n";
  }
  os << "</g>\n<polyline id=\"density\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\""
     << polyline(f, xs, ys) << "\"/>\n"
     << "<text x=\"" << kLeft + 8 << "\" y=\"" << kTop + 12 << "\" font-size=\"10\">"
     << tick_label(100.0 * s.interval.level) << "% interval [" << tick_label(s.interval.lo) << ", "
     << tick_label(s.interval.hi) << "], P(" << s.quantity << " &gt; " << tick_label(s.threshold)
     << ") = " << tick_label(s.prob_greater) << "</text>\n</svg>\n";
  return os.str();
}

std::pair<std::filesystem::path, std::filesystem::path> emit_curve_plot(
    const RhoCurve& curve, const std::filesystem::path& stem) {
  auto csv = stem;
  csv += ".csv";
  auto svg = stem;
  svg += ".svg";
  save_curve_csv(curve, csv);
  write_text_file(svg, curve_svg(curve));
  return {csv, svg};
}

std::pair<std::filesystem::path, std::filesystem::path> emit_posterior_plot(
    const PosteriorSummary& summary, const std::filesystem::path& stem) {
  auto csv = stem;
  csv += ".csv";
  auto svg = stem;
  svg += ".svg";
  save_posterior_csv(summary, csv);
  write_text_file(svg, posterior_svg(summary));
  return {csv, svg};
}

}  // namespace rhoflow
