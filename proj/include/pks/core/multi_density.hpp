#pragma once

#include <span>
#include <vector>

#include "pks/core/grid.hpp"

namespace pks {

// Relative tolerance on each species mass.
inline constexpr double kMassTolerance = 1e-8;

// n nonnegative densities on a shared grid, each carrying a prescribed mass.
class MultiDensity {
 public:
  // Validates: field sizes match the grid, entries finite and >= 0, masses > 0
  // and each field integrates to its mass within kMassTolerance.
  MultiDensity(Grid grid, std::vector<Field> fields, std::vector<double> masses);

  // Rescales each field to its prescribed mass before validating.
  static MultiDensity rescaled(Grid grid, std::vector<Field> fields, std::vector<double> masses);

  const Grid& grid() const { return grid_; }
  std::size_t species() const { return fields_.size(); }
  const Field& field(std::size_t i) const { return fields_[i]; }
  const std::vector<Field>& fields() const { return fields_; }
  double target_mass(std::size_t i) const { return masses_[i]; }
  const std::vector<double>& target_masses() const { return masses_; }

  bool operator==(const MultiDensity& other) const = default;

 private:
  Grid grid_;
  std::vector<Field> fields_;
  std::vector<double> masses_;
};

// Multiplies the field in place so that it integrates to `mass`.
void rescale_to_mass(const Grid& grid, Field& field, double mass);

}  // namespace pks
