// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

#include "pks/simd/kernels.hpp"

namespace pks::simd {

namespace {

// exp on [-746, 710] by 2^n e^r, |r| <= ln2/2, degree-13 Taylor polynomial.
// The scale 2^n is applied as two factors so subnormal results stay exact
// to rounding.
inline __m256d exp4(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-746.0);
  const __m256d hi = _mm256_set1_pd(710.0);
  x = _mm256_min_pd(hi, _mm256_max_pd(lo, x));  // NaN passes through
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 2^52 + 2^51
  const __m256d bias = _mm256_set1_pd(1023.0);
  __m256d n1 = _mm256_floor_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.5)));
  __m256d n2 = _mm256_sub_pd(n, n1);
  __m256i e1 = _mm256_slli_epi64(_mm256_castpd_si256(_mm256_add_pd(_mm256_add_pd(n1, bias), magic)), 52);
  __m256i e2 = _mm256_slli_epi64(_mm256_castpd_si256(_mm256_add_pd(_mm256_add_pd(n2, bias), magic)), 52);
  p = _mm256_mul_pd(p, _mm256_castsi256_pd(e1));
  return _mm256_mul_pd(p, _mm256_castsi256_pd(e2));
}

// log for positive normal finite x: x = m 2^e with m in [sqrt(1/2), sqrt(2)),
// log m = 2 atanh(s), s = (m - 1)/(m + 1). Other lanes are flagged in `bad`.
inline __m256d log4(__m256d x, int& bad) {
  const __m256d min_normal = _mm256_set1_pd(std::numeric_limits<double>::min());
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d ok = _mm256_and_pd(_mm256_cmp_pd(x, min_normal, _CMP_GE_OQ), _mm256_cmp_pd(x, inf, _CMP_LT_OQ));
  bad = (~_mm256_movemask_pd(ok)) & 0xF;

  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256i bits = _mm256_castpd_si256(x);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  // Exponent as double via the magic-number trick.
  __m256i ebits = _mm256_srli_epi64(bits, 52);
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);  // 2^52
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(ebits, _mm256_castpd_si256(magic))), magic);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));

  __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  __m256d f = _mm256_sub_pd(m, _mm256_set1_pd(1.0));
  __m256d s = _mm256_div_pd(f, _mm256_add_pd(f, _mm256_set1_pd(2.0)));
  __m256d z = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(1.0 / 23.0);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 21.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 19.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 17.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 15.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / 3.0));
  __m256d two_s = _mm256_add_pd(s, s);
  __m256d tail = _mm256_mul_pd(_mm256_mul_pd(two_s, z), p);

  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  __m256d lo = _mm256_fmadd_pd(e, ln2_lo, tail);
  return _mm256_add_pd(_mm256_fmadd_pd(e, ln2_hi, two_s), lo);
}

inline void fix_bad_log(const double* x, double* y, int bad) {
  for (int l = 0; l < 4; ++l)
    if (bad >> l & 1) y[l] = std::log(x[l]);
}

void exp_avx2(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, exp4(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = std::exp(x[i]);
}

void log_avx2(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    int bad;
    _mm256_storeu_pd(y + i, log4(_mm256_loadu_pd(x + i), bad));
    if (bad) fix_bad_log(x + i, y + i, bad);
  }
  for (; i < n; ++i) y[i] = std::log(x[i]);
}

void col_max_avx2(const double* in, double* m, int rows, int cols) {
  std::fill(m, m + cols, -std::numeric_limits<double>::infinity());
  for (int r = 0; r < rows; ++r) {
    const double* row = in + static_cast<std::size_t>(r) * cols;
    int c = 0;
    for (; c + 4 <= cols; c += 4)
      _mm256_storeu_pd(m + c, _mm256_max_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(m + c)));
    for (; c < cols; ++c) m[c] = std::max(m[c], row[c]);
  }
}

void exp_shift_avx2(const double* in, const double* shift, double* w, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    const std::size_t o = static_cast<std::size_t>(r) * cols;
    int c = 0;
    for (; c + 4 <= cols; c += 4) {
      __m256d v = _mm256_sub_pd(_mm256_loadu_pd(in + o + c), _mm256_loadu_pd(shift + c));
      _mm256_storeu_pd(w + o + c, exp4(v));
    }
    for (; c < cols; ++c) w[o + c] = std::exp(in[o + c] - shift[c]);
  }
}

void log_shift_avx2(const double* s, const double* shift, double* out, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    const std::size_t o = static_cast<std::size_t>(r) * cols;
    int c = 0;
    for (; c + 4 <= cols; c += 4) {
      int bad;
      __m256d l = log4(_mm256_loadu_pd(s + o + c), bad);
      if (bad) {
        alignas(32) double tmp[4];
        _mm256_store_pd(tmp, l);
        fix_bad_log(s + o + c, tmp, bad);
        l = _mm256_load_pd(tmp);
      }
      _mm256_storeu_pd(out + o + c, _mm256_add_pd(_mm256_loadu_pd(shift + c), l));
    }
    for (; c < cols; ++c) out[o + c] = shift[c] + std::log(s[o + c]);
  }
}

void band_apply_avx2(const double* kern, int band, const double* in, double* out, int rows,
                     int cols, int row_begin, int row_end) {
  for (int r = row_begin; r < row_end; ++r) {
    double* dst = out + static_cast<std::size_t>(r) * cols;
    const int k0 = std::max(0, r - band), k1 = std::min(rows - 1, r + band);
    int c = 0;
    for (; c + 16 <= cols; c += 16) {
      __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
      __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
      for (int k = k0; k <= k1; ++k) {
        const __m256d kv = _mm256_broadcast_sd(kern + (k > r ? k - r : r - k));
        const double* src = in + static_cast<std::size_t>(k) * cols + c;
        a0 = _mm256_fmadd_pd(kv, _mm256_loadu_pd(src), a0);
        a1 = _mm256_fmadd_pd(kv, _mm256_loadu_pd(src + 4), a1);
        a2 = _mm256_fmadd_pd(kv, _mm256_loadu_pd(src + 8), a2);
        a3 = _mm256_fmadd_pd(kv, _mm256_loadu_pd(src + 12), a3);
      }
      _mm256_storeu_pd(dst + c, a0);
      _mm256_storeu_pd(dst + c + 4, a1);
      _mm256_storeu_pd(dst + c + 8, a2);
      _mm256_storeu_pd(dst + c + 12, a3);
    }
    for (; c + 4 <= cols; c += 4) {
      __m256d a0 = _mm256_setzero_pd();
      for (int k = k0; k <= k1; ++k) {
        const __m256d kv = _mm256_broadcast_sd(kern + (k > r ? k - r : r - k));
        a0 = _mm256_fmadd_pd(kv, _mm256_loadu_pd(in + static_cast<std::size_t>(k) * cols + c), a0);
      }
      _mm256_storeu_pd(dst + c, a0);
    }
    for (; c < cols; ++c) {
      double a = 0.0;
      for (int k = k0; k <= k1; ++k)
        a += kern[k > r ? k - r : r - k] * in[static_cast<std::size_t>(k) * cols + c];
      dst[c] = a;
    }
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{Isa::Avx2,     "avx2",         exp_avx2,
                                 log_avx2,      col_max_avx2,   exp_shift_avx2,
                                 log_shift_avx2, band_apply_avx2};
  return table;
}

}  // namespace pks::simd
