#pragma once

#include <span>
#include <string>

#include "nnfit/geometry.hpp"

namespace nnfit {

// Static SVG scatter plot. Two-dimensional data inside [0,1]^2 is drawn in
// a unit-square frame with ticks at 0, 0.5 and 1; other planar data in the
// [-1,1]^2 frame. Three-dimensional data is shown as two orthographic
// projections of the upper (z >= 0) and lower hemisphere. Empty input is
// InvalidInput.
std::string scatter_svg(std::span<const Point> points, int dimension);

}  // namespace nnfit
