#include "pks/energy/random_fields.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pks/core/multi_density.hpp"

namespace pks::energy {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Field random_smooth_density(const Grid& grid, std::mt19937_64& rng, double mass) {
  const int n = grid.cells();
  const double half = 0.5 * grid.half_extent();
  const int bumps = 1 + static_cast<int>(uniform01(rng) * 5.0);
  Field f(grid.size(), 0.0);
  for (int b = 0; b < bumps; ++b) {
    double cx = -half + 2.0 * half * uniform01(rng);
    double cy = -half + 2.0 * half * uniform01(rng);
    double sigma = 0.3 + 1.2 * uniform01(rng);
    double weight = 0.2 + 0.8 * uniform01(rng);
    double inv = 1.0 / (2.0 * sigma * sigma);
    double amp = weight / (2.0 * std::numbers::pi * sigma * sigma);
    for (int p = 0; p < n; ++p) {
      double dx = grid.center(p) - cx;
      for (int q = 0; q < n; ++q) {
        double dy = grid.center(q) - cy;
        f[grid.index(p, q)] += amp * std::exp(-(dx * dx + dy * dy) * inv);
      }
    }
  }
  rescale_to_mass(grid, f, mass);
  return f;
}

Field random_rough_density(const Grid& grid, std::mt19937_64& rng, double mass) {
  Field f(grid.size());
  for (double& v : f) v = 1.0 - uniform01(rng);
  rescale_to_mass(grid, f, mass);
  return f;
}

Field uniform_box(const Grid& grid, double cx, double cy, double side, double mass) {
  const int n = grid.cells();
  Field f(grid.size(), 0.0);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (std::abs(grid.center(p) - cx) < 0.5 * side && std::abs(grid.center(q) - cy) < 0.5 * side)
        f[grid.index(p, q)] = 1.0;
  rescale_to_mass(grid, f, mass);
  return f;
}

}  // namespace pks::energy
