#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "pks/simd/kernels.hpp"

namespace pks::simd {

namespace {

void exp_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(x[i]);
}

void log_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::log(x[i]);
}

void col_max_scalar(const double* in, double* m, int rows, int cols) {
  std::fill(m, m + cols, -std::numeric_limits<double>::infinity());
  for (int r = 0; r < rows; ++r) {
    const double* row = in + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) m[c] = std::max(m[c], row[c]);
  }
}

void exp_shift_scalar(const double* in, const double* shift, double* w, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    const std::size_t o = static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) w[o + c] = std::exp(in[o + c] - shift[c]);
  }
}

void log_shift_scalar(const double* s, const double* shift, double* out, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    const std::size_t o = static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) out[o + c] = shift[c] + std::log(s[o + c]);
  }
}

void band_apply_scalar(const double* kern, int band, const double* in, double* out, int rows,
                       int cols, int row_begin, int row_end) {
  for (int r = row_begin; r < row_end; ++r) {
    double* dst = out + static_cast<std::size_t>(r) * cols;
    std::memset(dst, 0, sizeof(double) * cols);
    const int k0 = std::max(0, r - band), k1 = std::min(rows - 1, r + band);
    for (int k = k0; k <= k1; ++k) {
      const double kv = kern[k > r ? k - r : r - k];
      const double* src = in + static_cast<std::size_t>(k) * cols;
      for (int c = 0; c < cols; ++c) dst[c] += kv * src[c];
    }
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::Scalar,      "scalar",         exp_scalar,
                                 log_scalar,       col_max_scalar,   exp_shift_scalar,
                                 log_shift_scalar, band_apply_scalar};
  return table;
}

}  // namespace pks::simd
