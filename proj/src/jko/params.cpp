#include "pks/jko/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pks::jko {

namespace {

void positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string("jko: ") + name + " must be finite and > 0");
}

}  // namespace

void JkoParams::validate() const {
  positive(tau, "tau");
  if (eps != 0.0) positive(eps, "eps");
  positive(inner_tol, "inner_tol");
  positive(sinkhorn_tol, "sinkhorn_tol");
  positive(report_tol, "report_tol");
  if (max_outer < 1) throw std::invalid_argument("jko: max_outer must be >= 1");
  if (max_inner < 1) throw std::invalid_argument("jko: max_inner must be >= 1");
  if (sinkhorn_max_iter < 1) throw std::invalid_argument("jko: sinkhorn_max_iter must be >= 1");
}

}  // namespace pks::jko
