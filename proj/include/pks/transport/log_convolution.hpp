#pragma once

#include <span>
#include <vector>

#include "pks/core/grid.hpp"
#include "pks/simd/kernels.hpp"

namespace pks::transport {

// Sums below this fall back to an exact log-sum-exp for that output.
inline constexpr double kUnderflowFloor = 1e-280;

// out(x) = log sum_y exp(in(y) - |x - y|^2 / eps) over the grid cells, done as
// two 1-D passes. Each pass shifts every column by its max, applies the banded
// Gaussian kernel exp(-(d h)^2 / eps) (entries that underflow are dropped,
// which is exact to about 1e-40 relative once the sum exceeds
// kUnderflowFloor), and takes the log.
class GaussianLogConvolution {
 public:
  GaussianLogConvolution(const Grid& grid, double eps, const simd::KernelTable* kernels = nullptr);

  double eps() const { return eps_; }
  int band() const { return band_; }
  const Grid& grid() const { return grid_; }
  // Counts outputs that needed the exact fallback since construction.
  long fallback_count() const { return fallbacks_; }

  // Not reentrant: uses internal buffers.
  void apply(std::span<const double> in, std::span<double> out);

 private:
  void axis_pass(const double* in, double* out);

  Grid grid_;
  double eps_;
  int n_;
  int band_;
  const simd::KernelTable* k_;
  std::vector<double> kern_;
  std::vector<double> shift_, w_, s_, t1_, t2_;
  long fallbacks_ = 0;
};

void transpose(const double* in, double* out, int n);

}  // namespace pks::transport
