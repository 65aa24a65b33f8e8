#pragma once

#include <array>
#include <span>

#include "pks/core/grid.hpp"
#include "pks/core/multi_density.hpp"

namespace pks {

// Sum rho h^2 over the grid.
double field_mass(const Grid& grid, std::span<const double> field);
// Sum |x|^2 rho h^2 over the grid.
double field_second_moment(const Grid& grid, std::span<const double> field);

// Discrete mass of species i (0-based).
double mass(const MultiDensity& rho, std::size_t i);
// Second moment summed over species.
double second_moment(const MultiDensity& rho);

// Gaussian bump renormalized to have discrete mass exactly `mass`.
Field make_gaussian(const Grid& grid, std::array<double, 2> center, double sigma, double mass);
// Constant field of the given total mass.
Field make_uniform(const Grid& grid, double mass);

}  // namespace pks
