#pragma once

#include <string>

#include "habopt/grid.hpp"

namespace habopt {

/// Cell-rect heatmap of a 1D or 2D field: exactly one <rect> per grid cell,
/// colored on a fixed viridis-like ramp over [vmin, vmax]. Deterministic
/// output, no timestamps.
std::string heatmap_svg(const ScalarField& f, double vmin, double vmax,
                        const std::string& label);

/// 1D line profile as a single polyline over the cell centers.
std::string profile_svg(const ScalarField& f, double vmin, double vmax,
                        const std::string& label);

}  // namespace habopt
