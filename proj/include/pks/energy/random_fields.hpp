#pragma once

#include <cstdint>
#include <random>

#include "pks/core/grid.hpp"

namespace pks::energy {

// Uniform double in [0, 1) built from the top 53 bits, so sequences are the
// same on every standard library (std distributions are not).
double uniform01(std::mt19937_64& rng);

// Mixture of 1..5 Gaussian bumps, centers in [-L/2, L/2]^2, widths in
// [0.3, 1.5], weights in [0.2, 1], normalized to `mass`. Peak density is at
// most mass / (2 pi 0.3^2).
Field random_smooth_density(const Grid& grid, std::mt19937_64& rng, double mass = 1.0);

// Independent uniform cell values in (0, 1], normalized to `mass`.
Field random_rough_density(const Grid& grid, std::mt19937_64& rng, double mass = 1.0);

// Indicator of an axis-aligned box of side `side` centered at c, normalized to `mass`.
Field uniform_box(const Grid& grid, double cx, double cy, double side, double mass = 1.0);

}  // namespace pks::energy
