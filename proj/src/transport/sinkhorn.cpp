#include "pks/transport/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pks::transport {

namespace {

constexpr double kScalingTol = 1e-4;

void log_weights(std::span<const double> a, std::vector<double>& la) {
  la.resize(a.size());
  const double ninf = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) la[i] = a[i] > 0.0 ? std::log(a[i]) : ninf;
}

double dot(std::span<const double> a, const Field& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > 0.0) s += a[i] * f[i];
  return s;
}

}  // namespace

SinkhornSolver::SinkhornSolver(const Grid& grid, double eps, const simd::KernelTable* kernels)
    : grid_(grid),
      eps_(eps),
      kernels_(kernels ? kernels : &simd::active_kernels()),
      conv_(grid, eps, kernels_) {
  const std::size_t m = grid.size();
  h_.resize(m);
  t_.resize(m);
  fh_.resize(m);
}

std::vector<double> SinkhornSolver::scaling_levels() const {
  const double L = grid_.half_extent();
  std::vector<double> levels;
  for (double e = 0.0625 * L * L; e > 2.0 * eps_; e *= 0.5) levels.push_back(e);
  return levels;
}

SinkhornSolver::Stats SinkhornSolver::cross_at(GaussianLogConvolution& conv,
                                               std::span<const double> a,
                                               std::span<const double> b, Field& f, Field& g,
                                               double tol, int max_iter, double relaxation) {
  const std::size_t m = grid_.size();
  const double eps = conv.eps(), inv = 1.0 / eps;
  if (f.size() != m) f.assign(m, 0.0);
  g.resize(m);
  Stats st;
  double omega = 1.0, prev_err = std::numeric_limits<double>::infinity();
  int rising = 0;
  for (int it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i < m; ++i) h_[i] = la_[i] + f[i] * inv;
    conv.apply(h_, t_);
    for (std::size_t i = 0; i < m; ++i) g[i] = -eps * t_[i];
    for (std::size_t i = 0; i < m; ++i) h_[i] = lb_[i] + g[i] * inv;
    conv.apply(h_, t_);
    for (std::size_t i = 0; i < m; ++i) {
      fh_[i] = -eps * t_[i];
      h_[i] = (f[i] - fh_[i]) * inv;
    }
    kernels_->exp(h_.data(), t_.data(), m);
    double err = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (a[i] > 0.0) err += a[i] * std::abs(t_[i] - 1.0);
    st.iterations = it;
    st.marginal_error = err;
    if (err <= tol || it == max_iter) {
      std::copy(fh_.begin(), fh_.end(), f.begin());
      st.converged = err <= tol;
      break;
    }
    // Plain steps first; fall back to them for good if the error keeps rising.
    if (it == 4) omega = relaxation;
    rising = err > prev_err ? rising + 1 : 0;
    if (rising >= 3) omega = 1.0;
    prev_err = err;
    for (std::size_t i = 0; i < m; ++i) f[i] += omega * (fh_[i] - f[i]);
  }
  st.value = dot(a, f) + dot(b, g);
  return st;
}

SinkhornSolver::Stats SinkhornSolver::self_at(GaussianLogConvolution& conv,
                                              std::span<const double> a, Field& f, double tol,
                                              int max_iter) {
  const std::size_t m = grid_.size();
  const double eps = conv.eps(), inv = 1.0 / eps;
  if (f.size() != m) f.assign(m, 0.0);
  Stats st;
  double plan_mass = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i < m; ++i) h_[i] = la_[i] + f[i] * inv;
    conv.apply(h_, t_);
    for (std::size_t i = 0; i < m; ++i) {
      fh_[i] = -eps * t_[i];
      h_[i] = (f[i] - fh_[i]) * inv;
    }
    kernels_->exp(h_.data(), t_.data(), m);
    double err = 0.0;
    plan_mass = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (a[i] <= 0.0) continue;
      err += a[i] * std::abs(t_[i] - 1.0);
      plan_mass += a[i] * t_[i];
    }
    st.iterations = it;
    st.marginal_error = err;
    if (err <= tol || it == max_iter) {
      st.converged = err <= tol;
      break;
    }
    for (std::size_t i = 0; i < m; ++i) f[i] = 0.5 * (f[i] + fh_[i]);
  }
  st.value = 2.0 * dot(a, f) - eps * (plan_mass - 1.0);
  return st;
}

SinkhornSolver::Stats SinkhornSolver::solve_cross(std::span<const double> a,
                                                  std::span<const double> b, Field& f, Field& g,
                                                  double tol, int max_iter, double relaxation) {
  const std::size_t m = grid_.size();
  if (a.size() != m || b.size() != m) throw std::invalid_argument("sinkhorn: size mismatch");
  log_weights(a, la_);
  log_weights(b, lb_);
  int total = 0;
  if (f.size() != m) {
    f.assign(m, 0.0);
    for (double e : scaling_levels()) {
      GaussianLogConvolution level(grid_, e, kernels_);
      total += cross_at(level, a, b, f, g, std::max(tol, kScalingTol), max_iter, relaxation).iterations;
    }
  }
  Stats st = cross_at(conv_, a, b, f, g, tol, max_iter, relaxation);
  st.iterations += total;
  return st;
}

SinkhornSolver::Stats SinkhornSolver::solve_self(std::span<const double> a, Field& f, double tol,
                                                 int max_iter) {
  const std::size_t m = grid_.size();
  if (a.size() != m) throw std::invalid_argument("sinkhorn: size mismatch");
  log_weights(a, la_);
  int total = 0;
  if (f.size() != m) {
    f.assign(m, 0.0);
    for (double e : scaling_levels()) {
      GaussianLogConvolution level(grid_, e, kernels_);
      total += self_at(level, a, f, std::max(tol, kScalingTol), max_iter).iterations;
    }
  }
  Stats st = self_at(conv_, a, f, tol, max_iter);
  st.iterations += total;
  return st;
}

std::vector<double> probability_weights(const Grid& grid, std::span<const double> field,
                                        double* mass_out) {
  if (field.size() != grid.size()) throw std::invalid_argument("sinkhorn: field size mismatch");
  double s = 0.0;
  for (double v : field) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("sinkhorn: densities must be finite and nonnegative");
    }
    s += v;
  }
  if (!(s > 0.0)) throw std::invalid_argument("sinkhorn: zero-mass density");
  std::vector<double> w(field.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = field[i] / s;
  if (mass_out) *mass_out = s * grid.cell_area();
  return w;
}

TransportResult sinkhorn_w2(const Grid& grid, std::span<const double> mu,
                            std::span<const double> nu, const SinkhornOptions& options) {
  double ma = 0.0, mb = 0.0;
  std::vector<double> a = probability_weights(grid, mu, &ma);
  std::vector<double> b = probability_weights(grid, nu, &mb);
  if (std::abs(ma - mb) > kMassTolerance * std::max(ma, mb)) {
    throw std::invalid_argument("sinkhorn: masses differ (" + std::to_string(ma) + " vs " +
                                std::to_string(mb) + ")");
  }
  const double eps = options.eps > 0.0 ? options.eps : grid.cell_area();
  if (options.eps < 0.0) throw std::invalid_argument("sinkhorn: eps must be > 0");
  SinkhornSolver solver(grid, eps);
  TransportResult r;
  r.eps_final = eps;

  Field fa;
  SinkhornSolver::Stats sa = solver.solve_self(a, fa, options.tol, options.max_iter);
  if (std::equal(mu.begin(), mu.end(), nu.begin())) {
    r.w2_squared = 0.0;
    r.f = fa;
    r.g = fa;
    r.marginal_error = sa.marginal_error;
    r.iterations = sa.iterations;
    r.converged = sa.converged;
    return r;
  }
  Field fb;
  SinkhornSolver::Stats sb = solver.solve_self(b, fb, options.tol, options.max_iter);
  SinkhornSolver::Stats sx =
      solver.solve_cross(a, b, r.f, r.g, options.tol, options.max_iter, options.relaxation);
  double s = sx.value - 0.5 * (sa.value + sb.value);
  r.w2_squared = std::max(0.0, ma * s);
  r.marginal_error = std::max({sa.marginal_error, sb.marginal_error, sx.marginal_error});
  r.iterations = sa.iterations + sb.iterations + sx.iterations;
  r.converged = sa.converged && sb.converged && sx.converged;
  return r;
}

}  // namespace pks::transport
