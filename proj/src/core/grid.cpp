#include "pks/core/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pks {

Grid::Grid(double half_extent, int cells) {
  if (!(half_extent > 0.0) || !std::isfinite(half_extent)) {
    throw std::invalid_argument("grid: half extent must be finite and > 0");
  }
  if (cells < 4) {
    throw std::invalid_argument("grid: need at least 4 cells per side, got " +
                                std::to_string(cells));
  }
  cells_ = cells;
  spacing_ = 2.0 * half_extent / cells;
  // Store L as h*N/2 so that h*N == 2L holds exactly.
  half_extent_ = 0.5 * (spacing_ * cells);
}

}  // namespace pks
