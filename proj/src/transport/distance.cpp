#include "pks/transport/distance.hpp"

#include <cmath>
#include <stdexcept>

namespace pks::transport {

ProductDistance product_distance(const MultiDensity& rho, const MultiDensity& eta, double eps,
                                 double tol) {
  if (!(rho.grid() == eta.grid())) throw std::invalid_argument("product_distance: grids differ");
  if (rho.species() != eta.species())
    throw std::invalid_argument("product_distance: species counts differ");
  SinkhornOptions opt;
  opt.eps = eps > 0.0 ? eps : rho.grid().cell_area();
  opt.tol = tol;
  ProductDistance out;
  out.converged = true;
  double s = 0.0;
  for (std::size_t i = 0; i < rho.species(); ++i) {
    TransportResult r = sinkhorn_w2(rho.grid(), rho.field(i), eta.field(i), opt);
    out.species_squared.push_back(r.w2_squared);
    out.converged = out.converged && r.converged;
    s += r.w2_squared;
  }
  out.distance = std::sqrt(s);
  return out;
}

}  // namespace pks::transport
