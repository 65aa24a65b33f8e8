#include "pks/energy/potential.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "pks/energy/gradient.hpp"

namespace pks::energy {

namespace {

// FFTW planning is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (!ptr) throw std::bad_alloc();
    std::memset(ptr, 0, bytes);
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* real() { return static_cast<double*>(ptr); }
  fftw_complex* cplx() { return static_cast<fftw_complex*>(ptr); }
  void* ptr;
};

}  // namespace

struct LogKernelConvolver::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

double LogKernelConvolver::kernel(const Grid& grid, int di, int dj) {
  const double h = grid.spacing();
  if (di == 0 && dj == 0) return std::log(h) + kSelfCellLogMean;
  return std::log(h) + 0.5 * std::log(static_cast<double>(di) * di + static_cast<double>(dj) * dj);
}

LogKernelConvolver::LogKernelConvolver(const Grid& grid)
    : grid_(grid), padded_(2 * grid.cells()), plans_(std::make_unique<Plans>()) {
  const int m = padded_;
  const int mc = m / 2 + 1;
  const std::size_t nreal = static_cast<std::size_t>(m) * m;
  const std::size_t ncplx = static_cast<std::size_t>(m) * mc;
  FftwBuffer in(sizeof(double) * nreal), out(sizeof(fftw_complex) * ncplx);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    // FFTW_ESTIMATE keeps the plan, and so the rounding, identical run to run.
    plans_->forward = fftw_plan_dft_r2c_2d(m, m, in.real(), out.cplx(), FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_c2r_2d(m, m, out.cplx(), in.real(), FFTW_ESTIMATE);
  }
  if (!plans_->forward || !plans_->backward) throw std::runtime_error("fftw: planning failed");

  const int n = grid.cells();
  double* k = in.real();
  for (int i = 0; i < m; ++i) {
    int di = i < n ? i : i - m;
    for (int j = 0; j < m; ++j) {
      int dj = j < n ? j : j - m;
      // Offsets of +-N never pair two grid cells.
      k[static_cast<std::size_t>(i) * m + j] = (i == n || j == n) ? 0.0 : kernel(grid, di, dj);
    }
  }
  fftw_execute_dft_r2c(plans_->forward, in.real(), out.cplx());
  kernel_hat_.resize(ncplx);
  const fftw_complex* o = out.cplx();
  for (std::size_t t = 0; t < ncplx; ++t) kernel_hat_[t] = {o[t][0], o[t][1]};
}

LogKernelConvolver::~LogKernelConvolver() = default;

Field LogKernelConvolver::potential(std::span<const double> rho) const {
  const int n = grid_.cells();
  if (rho.size() != grid_.size()) throw std::invalid_argument("potential: field size mismatch");
  const int m = padded_;
  const int mc = m / 2 + 1;
  const std::size_t nreal = static_cast<std::size_t>(m) * m;
  const std::size_t ncplx = static_cast<std::size_t>(m) * mc;
  FftwBuffer in(sizeof(double) * nreal), out(sizeof(fftw_complex) * ncplx);
  double* x = in.real();
  bool any = false;
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      double v = rho[grid_.index(p, q)];
      any = any || v != 0.0;
      x[static_cast<std::size_t>(p) * m + q] = v;
    }
  }
  Field u(grid_.size(), 0.0);
  if (!any) return u;
  fftw_execute_dft_r2c(plans_->forward, x, out.cplx());
  fftw_complex* c = out.cplx();
  for (std::size_t t = 0; t < ncplx; ++t) {
    std::complex<double> v(c[t][0], c[t][1]);
    v *= kernel_hat_[t];
    c[t][0] = v.real();
    c[t][1] = v.imag();
  }
  fftw_execute_dft_c2r(plans_->backward, c, x);
  const double scale = -grid_.cell_area() / (2.0 * std::numbers::pi * static_cast<double>(nreal));
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) u[grid_.index(p, q)] = scale * x[static_cast<std::size_t>(p) * m + q];
  return u;
}

PotentialField newtonian_potential(const Grid& grid, std::span<const double> rho,
                                   std::size_t species) {
  LogKernelConvolver conv(grid);
  return {grid, conv.potential(rho), species};
}

std::vector<Field> species_potentials(const MultiDensity& rho, const LogKernelConvolver& conv) {
  if (!(rho.grid() == conv.grid())) throw std::invalid_argument("potential: grid mismatch");
  std::vector<Field> out;
  out.reserve(rho.species());
  for (std::size_t i = 0; i < rho.species(); ++i) out.push_back(conv.potential(rho.field(i)));
  return out;
}

double local_h1_norm(const Grid& grid, std::span<const double> u, double radius) {
  Field gx, gy;
  gradient(grid, u, gx, gy);
  const int n = grid.cells();
  double s = 0.0;
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      double x = grid.center(p), y = grid.center(q);
      if (x * x + y * y >= radius * radius) continue;
      std::size_t k = grid.index(p, q);
      s += u[k] * u[k] + gx[k] * gx[k] + gy[k] * gy[k];
    }
  }
  return std::sqrt(s * grid.cell_area());
}

}  // namespace pks::energy
