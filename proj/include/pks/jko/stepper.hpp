#pragma once

#include <deque>
#include <memory>
#include <vector>

#include "pks/core/interaction.hpp"
#include "pks/core/multi_density.hpp"
#include "pks/energy/potential.hpp"
#include "pks/jko/params.hpp"
#include "pks/transport/sinkhorn.hpp"

namespace pks::jko {

struct StepReport {
  bool converged = false;
  int outer_iters = 0;
  int inner_iters = 0;       // Newton iterations, summed over species and refreshes
  long sinkhorn_iters = 0;   // Sinkhorn sweeps, including the reporting solves
  double energy_before = 0.0;
  double energy_after = 0.0;
  double step_distance_sq = 0.0;  // sum_i S_eps(rho_i^k, rho_i^{k-1})
  std::vector<double> species_distance_sq;
  double dissipation = 0.0;       // D_F(rho^k)
  std::vector<double> species_dissipation;
  // F(rho^{k-1}) - F(rho^k) - d^2 / (2 tau)
  double energy_decrease = 0.0;
  // (d^2 / tau^2) / D_F(rho^k); NaN when D_F = 0
  double production_ratio = 0.0;
  double final_change = 0.0;  // L1 change per unit mass of the last outer iteration
};

struct StepResult {
  MultiDensity density;
  StepReport report;
};

// Minimizing-movement step  argmin F(rho) + sum_i S_eps(rho_i, eta_i) / (2 tau),
// with S_eps the debiased Sinkhorn divergence.
//
// Outer loop: freeze V_i = -sum_j a_ij u_j at the current iterate. Inner loop,
// per species: Newton in log-density on
//   J_i(rho) = int rho ln rho + V_i rho + S_eps(rho, eta_i) / (2 tau),
// whose gradient is ln rho + V_i + (f_cross - f_self) / (2 tau). The model
// Hessian is rho^{-1} + tau^{-1} L_rho^{-1} with L_rho = -div(rho grad), so
// the step w solves (tau L_rho + rho) psi = -rho g, w = -g - psi, and
// rho <- rho exp(w) followed by exact mass re-imposition.
//
// The stepper keeps grid-sized workspaces and the self potentials of recent
// base points; results depend only on (base, dt), not on call history.
class JkoStepper {
 public:
  JkoStepper(const Grid& grid, InteractionMatrix a, JkoParams params);
  ~JkoStepper();

  StepResult step(const MultiDensity& base) { return step(base, params_.tau); }
  StepResult step(const MultiDensity& base, double dt);

  const JkoParams& params() const { return params_; }
  const InteractionMatrix& interaction() const { return a_; }
  double eps() const { return eps_; }

  // Free energy and per-species dissipation of rho, sharing one potential solve.
  void energy_and_dissipation(const MultiDensity& rho, double& energy,
                              std::vector<double>& species_dissipation) const;

 private:
  struct BaseState {
    std::vector<Field> fields;
    std::vector<Field> self_f;
    std::vector<double> self_ot;
    double energy = 0.0;
  };
  struct SpeciesSolve;
  class NewtonSystem;

  const BaseState& base_state(const MultiDensity& base);
  void check_gate(const MultiDensity& base);
  int newton(SpeciesSolve& s, double dt, long& sinkhorn_iters);

  Grid grid_;
  InteractionMatrix a_;
  JkoParams params_;
  double eps_;
  transport::SinkhornSolver sinkhorn_;
  energy::LogKernelConvolver conv_;
  std::unique_ptr<NewtonSystem> system_;
  std::deque<BaseState> cache_;
  std::vector<double> gated_masses_;
};

// One step with a fresh stepper. Throws std::invalid_argument unless the masses
// are subcritical for a (or params.allow_supercritical is set).
StepResult jko_step(const MultiDensity& rho_prev, const InteractionMatrix& a,
                    const JkoParams& params);

// The step of length delta_t in (0, tau] from the same base point.
MultiDensity de_giorgi_interpolate(const MultiDensity& rho_prev, const InteractionMatrix& a,
                                   const JkoParams& params, double delta_t);

}  // namespace pks::jko
