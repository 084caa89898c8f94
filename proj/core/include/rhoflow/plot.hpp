#pragma once

#include <filesystem>
#include <string>

#include "rhoflow/causal.hpp"
#include "rhoflow/io.hpp"

namespace rhoflow {

/// SVG of the rho-curve with the rho-value marker, inf/sup lines and, for
/// binary data, the assumption-free bounds.
std::string curve_svg(const RhoCurve& curve);

/// SVG of the smoothed posterior density with the credible interval shaded
/// and the pmf drawn as stems.
std::string posterior_svg(const PosteriorSummary& summary);

/// Writes <stem>.csv (plotted points) and <stem>.svg. Returns both paths.
std::pair<std::filesystem::path, std::filesystem::path> emit_curve_plot(
    const RhoCurve& curve, const std::filesystem::path& stem);
std::pair<std::filesystem::path, std::filesystem::path> emit_posterior_plot(
    const PosteriorSummary& summary, const std::filesystem::path& stem);

}  // namespace rhoflow
