#pragma once

#include "pks/core/multi_density.hpp"
#include "pks/transport/sinkhorn.hpp"

namespace pks::transport {

struct ProductDistance {
  double distance = 0.0;                // sqrt(sum_i S_eps(rho_i, eta_i))
  std::vector<double> species_squared;  // per-species S_eps in mass units
  bool converged = false;
};

// eps <= 0 means h^2.
ProductDistance product_distance(const MultiDensity& rho, const MultiDensity& eta, double eps,
                                 double tol = 1e-8);

}  // namespace pks::transport
