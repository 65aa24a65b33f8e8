#pragma once

#include <cstddef>
#include <string>

namespace pks::simd {

enum class Isa { Scalar, Avx2 };

// Hot loops of the log-domain Gaussian convolution. Matrices are row-major
// with `cols` contiguous entries per row.
struct KernelTable {
  Isa isa;
  const char* name;
  // y[i] = exp(x[i])
  void (*exp)(const double* x, double* y, std::size_t n);
  // y[i] = log(x[i])
  void (*log)(const double* x, double* y, std::size_t n);
  // m[c] = max_r in(r, c)
  void (*col_max)(const double* in, double* m, int rows, int cols);
  // w(r, c) = exp(in(r, c) - shift[c])
  void (*exp_shift)(const double* in, const double* shift, double* w, int rows, int cols);
  // out(r, c) = shift[c] + log(s(r, c))
  void (*log_shift)(const double* s, const double* shift, double* out, int rows, int cols);
  // out(r, c) = sum_{k, |k - r| <= band} kern[|k - r|] in(k, c), for rows
  // r in [row_begin, row_end).
  void (*band_apply)(const double* kern, int band, const double* in, double* out, int rows,
                     int cols, int row_begin, int row_end);
};

const KernelTable& scalar_kernels();
// nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2_kernels();

// Selected once per process: PKS_SIMD=scalar|avx2|auto (default auto).
const KernelTable& active_kernels();

bool cpu_has_avx2_fma();

}  // namespace pks::simd
