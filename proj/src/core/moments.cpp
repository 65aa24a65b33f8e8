#include "pks/core/moments.hpp"

#include <cmath>
#include <stdexcept>

namespace pks {

double field_mass(const Grid& grid, std::span<const double> field) {
  double s = 0.0;
  for (double v : field) s += v;
  return s * grid.cell_area();
}

double field_second_moment(const Grid& grid, std::span<const double> field) {
  const int n = grid.cells();
  double s = 0.0;
  for (int p = 0; p < n; ++p) {
    double x = grid.center(p);
    double row = 0.0;
    for (int q = 0; q < n; ++q) {
      double y = grid.center(q);
      row += (x * x + y * y) * field[grid.index(p, q)];
    }
    s += row;
  }
  return s * grid.cell_area();
}

double mass(const MultiDensity& rho, std::size_t i) {
  if (i >= rho.species()) throw std::out_of_range("mass: species index out of range");
  return field_mass(rho.grid(), rho.field(i));
}

double second_moment(const MultiDensity& rho) {
  double s = 0.0;
  for (std::size_t i = 0; i < rho.species(); ++i) s += field_second_moment(rho.grid(), rho.field(i));
  return s;
}

Field make_gaussian(const Grid& grid, std::array<double, 2> center, double sigma, double mass) {
  if (!(sigma > 0.0)) throw std::invalid_argument("make_gaussian: sigma must be > 0");
  if (!(mass > 0.0)) throw std::invalid_argument("make_gaussian: mass must be > 0");
  const int n = grid.cells();
  Field f(grid.size());
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int p = 0; p < n; ++p) {
    double dx = grid.center(p) - center[0];
    for (int q = 0; q < n; ++q) {
      double dy = grid.center(q) - center[1];
      f[grid.index(p, q)] = std::exp(-(dx * dx + dy * dy) * inv);
    }
  }
  double m = field_mass(grid, f);
  if (!(m > 0.0)) throw std::invalid_argument("make_gaussian: bump underflows on this grid");
  double s = mass / m;
  for (double& v : f) v *= s;
  return f;
}

Field make_uniform(const Grid& grid, double mass) {
  if (!(mass > 0.0)) throw std::invalid_argument("make_uniform: mass must be > 0");
  double area = 4.0 * grid.half_extent() * grid.half_extent();
  return Field(grid.size(), mass / area);
}

}  // namespace pks
