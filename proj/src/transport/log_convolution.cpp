#include "pks/transport/log_convolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pks/simd/parallel.hpp"

#if defined(__SSE__) || defined(__x86_64__)
#include <xmmintrin.h>
#define PKS_HAVE_MXCSR 1
#endif

namespace pks::transport {

namespace {

// Far-field kernel and weight products underflow into subnormals, which are
// very slow on x86. Any such term is below 2.2e-308 against sums of at least
// kUnderflowFloor, so flushing them to zero is harmless.
class FlushSubnormals {
 public:
#ifdef PKS_HAVE_MXCSR
  FlushSubnormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
  ~FlushSubnormals() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#endif
};

}  // namespace

void transpose(const double* in, double* out, int n) {
  constexpr int B = 32;
  for (int i0 = 0; i0 < n; i0 += B)
    for (int j0 = 0; j0 < n; j0 += B)
      for (int i = i0; i < std::min(n, i0 + B); ++i)
        for (int j = j0; j < std::min(n, j0 + B); ++j)
          out[static_cast<std::size_t>(j) * n + i] = in[static_cast<std::size_t>(i) * n + j];
}

GaussianLogConvolution::GaussianLogConvolution(const Grid& grid, double eps,
                                               const simd::KernelTable* kernels)
    : grid_(grid), eps_(eps), n_(grid.cells()), k_(kernels ? kernels : &simd::active_kernels()) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("sinkhorn: eps must be > 0");
  const double h = grid.spacing();
  kern_.assign(n_, 0.0);
  band_ = 0;
  for (int d = 0; d < n_; ++d) {
    double v = std::exp(-(d * h) * (d * h) / eps);
    if (v < std::numeric_limits<double>::min()) break;
    kern_[d] = v;
    band_ = d;
  }
  const std::size_t m = grid.size();
  shift_.resize(n_);
  w_.resize(m);
  s_.resize(m);
  t1_.resize(m);
  t2_.resize(m);
}

void GaussianLogConvolution::axis_pass(const double* in, double* out) {
  const int n = n_;
  const double ninf = -std::numeric_limits<double>::infinity();
  k_->col_max(in, shift_.data(), n, n);
  for (double& s : shift_)
    if (s == ninf) s = 0.0;  // empty column: exp gives zeros, fallback returns -inf
  k_->exp_shift(in, shift_.data(), w_.data(), n, n);
  const double* kern = kern_.data();
  const int band = band_;
  double* w = w_.data();
  double* s = s_.data();
  const simd::KernelTable* k = k_;
  simd::parallel_for(0, n, [=](int lo, int hi) {
    FlushSubnormals guard;  // MXCSR is per thread
    k->band_apply(kern, band, w, s, n, n, lo, hi);
  });
  k_->log_shift(s, shift_.data(), out, n, n);

  const double h2e = grid_.spacing() * grid_.spacing() / eps_;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t o = static_cast<std::size_t>(r) * n + c;
      if (s[o] >= kUnderflowFloor) continue;
      ++fallbacks_;
      double mx = ninf;
      for (int kk = 0; kk < n; ++kk) {
        double d = kk - r;
        mx = std::max(mx, in[static_cast<std::size_t>(kk) * n + c] - d * d * h2e);
      }
      if (mx == ninf) {
        out[o] = ninf;
        continue;
      }
      double acc = 0.0;
      for (int kk = 0; kk < n; ++kk) {
        double d = kk - r;
        acc += std::exp(in[static_cast<std::size_t>(kk) * n + c] - d * d * h2e - mx);
      }
      out[o] = mx + std::log(acc);
    }
  }
}

void GaussianLogConvolution::apply(std::span<const double> in, std::span<double> out) {
  if (in.size() != grid_.size() || out.size() != grid_.size()) {
    throw std::invalid_argument("log convolution: size mismatch");
  }
  FlushSubnormals guard;
  axis_pass(in.data(), t1_.data());
  transpose(t1_.data(), t2_.data(), n_);
  axis_pass(t2_.data(), t1_.data());
  transpose(t1_.data(), out.data(), n_);
}

}  // namespace pks::transport
