#pragma once

#include "pks/core/grid.hpp"

namespace pks::jko {

struct JkoParams {
  double tau = 1e-3;
  double eps = 0.0;          // entropic regularization; 0 means h^2
  double inner_tol = 1e-7;   // L1 change per unit mass between iterates
  int max_outer = 30;        // potential refreshes per step
  int max_inner = 2000;      // proximal (Newton) iterations per species and refresh
  double sinkhorn_tol = 1e-8;  // marginal tolerance inside the step
  double report_tol = 1e-9;    // marginal tolerance for the reported distances
  int sinkhorn_max_iter = 10000;
  bool allow_supercritical = false;

  // Throws std::invalid_argument on a bad field.
  void validate() const;
  double eps_for(const Grid& grid) const { return eps > 0.0 ? eps : grid.cell_area(); }
};

}  // namespace pks::jko
