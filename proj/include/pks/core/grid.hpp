#pragma once

#include <cstddef>
#include <vector>

namespace pks {

// Values of one species on the grid, row-major: index p*N + q for the cell
// with x-center center(p) and y-center center(q).
using Field = std::vector<double>;

// Uniform N x N cell-centered grid on the box [-L, L]^2.
class Grid {
 public:
  Grid(double half_extent, int cells);

  double half_extent() const { return half_extent_; }
  int cells() const { return cells_; }
  double spacing() const { return spacing_; }
  double cell_area() const { return spacing_ * spacing_; }
  std::size_t size() const { return static_cast<std::size_t>(cells_) * cells_; }

  double center(int i) const { return -half_extent_ + (i + 0.5) * spacing_; }
  std::size_t index(int p, int q) const {
    return static_cast<std::size_t>(p) * cells_ + q;
  }

  bool operator==(const Grid& other) const = default;

 private:
  double half_extent_;
  int cells_;
  double spacing_;
};

}  // namespace pks
