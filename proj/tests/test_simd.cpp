#include <algorithm>
#include <stdexcept>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "pks/simd/kernels.hpp"
#include "pks/simd/parallel.hpp"

using namespace pks::simd;

namespace {

std::vector<double> uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

double rel_diff(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST_CASE("scalar kernels match the standard library") {
  const KernelTable& k = scalar_kernels();
  std::mt19937_64 rng(11);
  auto x = uniform(rng, 257, -50.0, 50.0);
  std::vector<double> y(x.size());
  k.exp(x.data(), y.data(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == std::exp(x[i]));
  const int rows = 5, cols = 7;
  auto m = uniform(rng, rows * cols, -3.0, 3.0);
  std::vector<double> cm(cols);
  k.col_max(m.data(), cm.data(), rows, cols);
  for (int c = 0; c < cols; ++c) {
    double want = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < rows; ++r) want = std::max(want, m[r * cols + c]);
    CHECK(cm[c] == want);
  }
}

TEST_CASE("banded apply matches a dense product") {
  const KernelTable& k = scalar_kernels();
  std::mt19937_64 rng(12);
  const int rows = 13, cols = 6, band = 4;
  auto kern = uniform(rng, band + 1, 0.0, 1.0);
  auto in = uniform(rng, rows * cols, 0.0, 1.0);
  std::vector<double> out(rows * cols, -1.0);
  k.band_apply(kern.data(), band, in.data(), out.data(), rows, cols, 0, rows);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double s = 0.0;
      for (int q = 0; q < rows; ++q)
        if (std::abs(q - r) <= band) s += kern[std::abs(q - r)] * in[q * cols + c];
      CHECK(out[r * cols + c] == doctest::Approx(s).epsilon(1e-14));
    }
}

TEST_CASE("avx2 kernels agree with scalar kernels") {
  const KernelTable* fast = avx2_kernels();
  if (!fast) {
    MESSAGE("AVX2/FMA not available on this machine; equivalence not exercised");
    return;
  }
  const KernelTable& ref = scalar_kernels();
  std::mt19937_64 rng(13);

  SUBCASE("exp over the full range, odd lengths") {
    for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 1001u}) {
      auto x = uniform(rng, n, -745.0, 709.0);
      std::vector<double> a(n), b(n);
      ref.exp(x.data(), a.data(), n);
      fast->exp(x.data(), b.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        if (a[i] < std::numeric_limits<double>::min()) CHECK(std::abs(a[i] - b[i]) <= 1e-320);
        else CHECK(rel_diff(a[i], b[i]) <= 4e-16);
      }
    }
  }
  SUBCASE("exp edge values") {
    std::vector<double> x{0.0, -0.0, -800.0, 800.0, -std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity(), 1e-300, -1e-300};
    std::vector<double> a(x.size()), b(x.size());
    ref.exp(x.data(), a.data(), x.size());
    fast->exp(x.data(), b.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(rel_diff(a[i], b[i]) <= 4e-16);
    std::vector<double> nan{std::numeric_limits<double>::quiet_NaN()};
    fast->exp(nan.data(), b.data(), 1);
    CHECK(std::isnan(b[0]));
  }
  SUBCASE("log on positive values") {
    std::vector<double> x = uniform(rng, 999, -700.0, 700.0);
    for (double& v : x) v = std::exp(v);
    x.push_back(1.0);
    x.push_back(std::numeric_limits<double>::min());
    x.push_back(5e-324);
    x.push_back(0.0);
    x.push_back(std::numeric_limits<double>::infinity());
    std::vector<double> a(x.size()), b(x.size());
    ref.log(x.data(), a.data(), x.size());
    fast->log(x.data(), b.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      CAPTURE(x[i]);
      if (std::abs(a[i]) < 1e-300) CHECK(std::abs(b[i]) <= 1e-300);
      else CHECK(rel_diff(a[i], b[i]) <= 4e-16);
    }
  }
  SUBCASE("shifted exp, log and column max") {
    const int rows = 9, cols = 11;
    auto in = uniform(rng, rows * cols, -30.0, 5.0);
    auto shift = uniform(rng, cols, -2.0, 2.0);
    std::vector<double> a(rows * cols), b(rows * cols);
    ref.exp_shift(in.data(), shift.data(), a.data(), rows, cols);
    fast->exp_shift(in.data(), shift.data(), b.data(), rows, cols);
    for (int i = 0; i < rows * cols; ++i) CHECK(rel_diff(a[i], b[i]) <= 4e-16);
    auto s = uniform(rng, rows * cols, 1e-5, 10.0);
    ref.log_shift(s.data(), shift.data(), a.data(), rows, cols);
    fast->log_shift(s.data(), shift.data(), b.data(), rows, cols);
    for (int i = 0; i < rows * cols; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-14);
    std::vector<double> ma(cols), mb(cols);
    ref.col_max(in.data(), ma.data(), rows, cols);
    fast->col_max(in.data(), mb.data(), rows, cols);
    CHECK(ma == mb);
  }
  SUBCASE("banded apply, partial row ranges") {
    const int rows = 37, cols = 19, band = 6;
    auto kern = uniform(rng, band + 1, 0.0, 1.0);
    auto in = uniform(rng, rows * cols, 0.0, 1.0);
    std::vector<double> a(rows * cols, 0.0), b(rows * cols, 0.0);
    ref.band_apply(kern.data(), band, in.data(), a.data(), rows, cols, 3, 29);
    fast->band_apply(kern.data(), band, in.data(), b.data(), rows, cols, 3, 29);
    for (int i = 0; i < rows * cols; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-14 * (1 + std::abs(a[i])));
  }
}

TEST_CASE("active kernels are a valid table") {
  const KernelTable& k = active_kernels();
  CHECK(k.name != nullptr);
  if (!cpu_has_avx2_fma()) CHECK(k.isa == Isa::Scalar);
}

TEST_CASE("parallel_for covers every index exactly once") {
  for (int n : {0, 1, 5, 17, 1000}) {
    std::vector<std::atomic<int>> hits(n);
    parallel_for(0, n, [&](int lo, int hi) {
      for (int i = lo; i < hi; ++i) hits[i]++;
    }, 1);
    for (int i = 0; i < n; ++i) CHECK(hits[i] == 1);
  }
  CHECK(thread_count() >= 1);
}
