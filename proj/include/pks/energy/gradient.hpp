#pragma once

#include <span>

#include "pks/core/grid.hpp"

namespace pks::energy {

// Centered differences in the interior, one-sided first order on the boundary
// rows and columns. gx is d/dx (index p), gy is d/dy (index q).
void gradient(const Grid& grid, std::span<const double> f, Field& gx, Field& gy);

}  // namespace pks::energy
