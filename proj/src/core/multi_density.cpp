#include "pks/core/multi_density.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pks/core/moments.hpp"

namespace pks {

MultiDensity::MultiDensity(Grid grid, std::vector<Field> fields, std::vector<double> masses)
    : grid_(grid), fields_(std::move(fields)), masses_(std::move(masses)) {
  if (fields_.empty()) throw std::invalid_argument("density: no species");
  if (fields_.size() != masses_.size()) {
    throw std::invalid_argument("density: " + std::to_string(fields_.size()) + " fields but " +
                                std::to_string(masses_.size()) + " masses");
  }
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    const std::string who = "density: species " + std::to_string(i + 1);
    if (!(masses_[i] > 0.0) || !std::isfinite(masses_[i])) {
      throw std::invalid_argument(who + " mass must be finite and > 0");
    }
    if (fields_[i].size() != grid_.size()) {
      throw std::invalid_argument(who + " has " + std::to_string(fields_[i].size()) +
                                  " values, grid needs " + std::to_string(grid_.size()));
    }
    for (double v : fields_[i]) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument(who + " has a negative or non-finite value");
      }
    }
    double m = field_mass(grid_, fields_[i]);
    if (std::abs(m - masses_[i]) > kMassTolerance * masses_[i]) {
      throw std::invalid_argument(who + " integrates to " + std::to_string(m) + ", expected " +
                                  std::to_string(masses_[i]));
    }
  }
}

MultiDensity MultiDensity::rescaled(Grid grid, std::vector<Field> fields,
                                    std::vector<double> masses) {
  if (fields.size() == masses.size()) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].size() == grid.size() && masses[i] > 0.0) {
        rescale_to_mass(grid, fields[i], masses[i]);
      }
    }
  }
  return MultiDensity(grid, std::move(fields), std::move(masses));
}

void rescale_to_mass(const Grid& grid, Field& field, double mass) {
  double m = field_mass(grid, field);
  if (!(m > 0.0)) throw std::invalid_argument("density: cannot rescale a field with zero mass");
  double s = mass / m;
  for (double& v : field) v *= s;
}

}  // namespace pks
