#pragma once

#include <cstddef>
#include <span>

#include "pks/core/grid.hpp"

namespace pks::transport {

struct Point2 {
  double x, y;
};

// Largest support (cells with positive mass, per measure) accepted by exact_w2_lp.
inline constexpr std::size_t kMaxLpSupport = 1024;

// min sum_ij pi_ij |x_i - y_j|^2 over couplings of a and b (equal totals) by the
// transportation simplex: northwest-corner start, MODI potentials on the basis
// tree, block pricing.
double exact_transport_cost(std::span<const Point2> xs, std::span<const double> a,
                            std::span<const Point2> ys, std::span<const double> b);

// Unregularized W2^2 between two grid densities of equal mass, in mass units.
double exact_w2_lp(const Grid& grid, std::span<const double> mu, std::span<const double> nu);

}  // namespace pks::transport
