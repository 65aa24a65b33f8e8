#pragma once

#include <memory>
#include <span>
#include <vector>

#include "pks/core/grid.hpp"
#include "pks/core/multi_density.hpp"
#include "pks/transport/log_convolution.hpp"

namespace pks::transport {

struct SinkhornOptions {
  double eps = 0.0;        // 0 means h^2
  double tol = 1e-8;       // L1 marginal violation
  int max_iter = 10000;    // per eps level
  double relaxation = 1.6; // over-relaxation of the cross f-update
};

struct TransportResult {
  // Debiased entropic cost S_eps(mu, nu) in mass units, clamped at 0.
  double w2_squared = 0.0;
  // Cross potentials of the normalized problem (cost units).
  Field f, g;
  // Largest L1 marginal violation among the three solves.
  double marginal_error = 0.0;
  int iterations = 0;
  double eps_final = 0.0;
  bool converged = false;
};

// Log-domain Sinkhorn for probability vectors on one grid with cost |x-y|^2.
// Potentials live in cost units. An empty potential vector requests a cold
// start, which runs eps-scaling from (L/4)^2 down to the target eps.
class SinkhornSolver {
 public:
  SinkhornSolver(const Grid& grid, double eps, const simd::KernelTable* kernels = nullptr);

  struct Stats {
    double value = 0.0;  // entropic OT_eps(a, b)
    double marginal_error = 0.0;
    int iterations = 0;
    bool converged = false;
  };

  Stats solve_cross(std::span<const double> a, std::span<const double> b, Field& f, Field& g,
                    double tol, int max_iter, double relaxation = 1.6);
  Stats solve_self(std::span<const double> a, Field& f, double tol, int max_iter);

  double eps() const { return eps_; }
  const Grid& grid() const { return grid_; }
  long fallback_count() const { return conv_.fallback_count(); }

 private:
  Stats cross_at(GaussianLogConvolution& conv, std::span<const double> a,
                 std::span<const double> b, Field& f, Field& g, double tol, int max_iter,
                 double relaxation);
  Stats self_at(GaussianLogConvolution& conv, std::span<const double> a, Field& f, double tol,
                int max_iter);
  std::vector<double> scaling_levels() const;

  Grid grid_;
  double eps_;
  const simd::KernelTable* kernels_;
  GaussianLogConvolution conv_;
  std::vector<double> la_, lb_, h_, t_, fh_;
};

// Weights mu h^2 / mass(mu); throws if a value is negative or the mass is 0.
std::vector<double> probability_weights(const Grid& grid, std::span<const double> field,
                                        double* mass_out = nullptr);

// S_eps(mu, nu) = OT(mu,nu) - OT(mu,mu)/2 - OT(nu,nu)/2 computed on mu/beta,
// nu/beta and multiplied by beta.
TransportResult sinkhorn_w2(const Grid& grid, std::span<const double> mu,
                            std::span<const double> nu, const SinkhornOptions& options = {});

}  // namespace pks::transport
