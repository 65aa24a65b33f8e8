#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "pks/core/grid.hpp"
#include "pks/core/multi_density.hpp"

namespace pks::energy {

// Mean of ln|x| over the unit square centered at the origin,
// (pi/2 - 3 - ln 2) / 2. The self-cell kernel value is ln h + this.
inline constexpr double kSelfCellLogMean = -1.0611754268825243451;

struct PotentialField {
  Grid grid;
  Field values;
  std::size_t species = 0;
};

// u = -(1/2pi) ln * rho on the grid, evaluated as a free-space convolution with
// the cell-averaged log kernel through a zero-padded 2N x 2N real FFT.
// Plans and the kernel transform are built once per grid. potential() is
// reentrant: it allocates its own work buffers.
class LogKernelConvolver {
 public:
  explicit LogKernelConvolver(const Grid& grid);
  ~LogKernelConvolver();
  LogKernelConvolver(const LogKernelConvolver&) = delete;
  LogKernelConvolver& operator=(const LogKernelConvolver&) = delete;

  const Grid& grid() const { return grid_; }
  Field potential(std::span<const double> rho) const;

  // Kernel value K(d) for a lattice offset d = (di, dj) in cells.
  static double kernel(const Grid& grid, int di, int dj);

 private:
  struct Plans;
  Grid grid_;
  int padded_;
  std::unique_ptr<Plans> plans_;
  std::vector<std::complex<double>> kernel_hat_;
};

PotentialField newtonian_potential(const Grid& grid, std::span<const double> rho,
                                   std::size_t species = 0);

// One potential per species.
std::vector<Field> species_potentials(const MultiDensity& rho, const LogKernelConvolver& conv);

// Local H^1 norm of u over the disc |x| < radius (diagnostic only).
double local_h1_norm(const Grid& grid, std::span<const double> u, double radius);

}  // namespace pks::energy
