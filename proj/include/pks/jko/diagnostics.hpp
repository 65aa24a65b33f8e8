#pragma once

#include <string>
#include <vector>

#include "pks/jko/scheme.hpp"

namespace pks::jko {

// (d^2 / tau^2) / D_F(rho^k) per step, total and per species. Steps with zero
// dissipation give NaN and are left out of the summary statistics.
struct ProductionSeries {
  std::vector<int> steps;
  std::vector<double> ratio;
  std::vector<std::vector<double>> species;  // [step][species]
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};
ProductionSeries production_check(const Trajectory& tr);

// F(rho(T)) + (1/2) sum_k tau D_F(rho^k) + (1/2) int D_F(De Giorgi interpolant)
// against F(rho^0). The interpolant integral uses Simpson's rule when the
// samples are exactly the midpoints and the trapezoid rule over the sampled
// fractions (plus both step endpoints) otherwise.
struct EnergyIdentityReport {
  int steps = 0;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double piecewise_term = 0.0;
  double interpolant_term = 0.0;
  double lhs = 0.0;
  double defect = 0.0;           // lhs - F(rho^0); <= 0 is the inequality direction
  double energy_drop = 0.0;      // F(rho^0) - F(rho(T))
  double relative_defect = 0.0;  // |defect| / |energy_drop|
  bool holds = true;             // defect <= max(rel_tol |energy_drop|, slack_per_step steps)
  std::string quadrature = "none";
};
EnergyIdentityReport energy_identity_report(const Trajectory& tr, double rel_tol = 0.05,
                                            double slack_per_step = 1e-6);

// One-step inequality F(rho^k) + d^2/(2 tau) <= F(rho^{k-1}) + slack and its
// telescoped form over every prefix of the run.
struct EnergyInequalityCheck {
  double min_step_margin = 0.0;        // min_k energy_decrease_k + slack
  double min_telescoped_margin = 0.0;  // min_k F0 - F_k + k slack - sum d^2/(2 tau)
  int worst_step = 0;
  bool step_holds = true;
  bool telescoped_holds = true;
};
EnergyInequalityCheck energy_inequality_check(const Trajectory& tr, double slack_per_step = 1e-6);

struct SlopeWindow {
  int first = 0;  // record indices, inclusive
  int last = 0;
};
// Records before the halting record (if any) and before the first record whose
// boundary fraction exceeds boundary_limit.
SlopeWindow pre_halt_window(const Trajectory& tr, double boundary_limit = 1e-3);

struct SlopeCheck {
  double measured = 0.0;
  double predicted = 0.0;
  double rel_error = 0.0;
  SlopeWindow window;
  int samples = 0;
};
// Least-squares slope of M2 against t over the window. Throws
// std::invalid_argument when the window holds fewer than 5 records.
SlopeCheck slope_check(const Trajectory& tr, SlopeWindow window);
SlopeCheck slope_check(const Trajectory& tr);

// C = max over snapshot pairs of d(rho(t), rho(s)) / (sqrt|t - s| + sqrt tau).
struct HolderFit {
  double constant = 0.0;
  int pairs = 0;
  double worst_s = 0.0;
  double worst_t = 0.0;
  double worst_distance = 0.0;
};
// Uses the listed snapshot indices (all snapshots when empty).
HolderFit holder_fit(const Trajectory& tr, const std::vector<int>& snapshot_indices = {},
                     double sinkhorn_tol = 1e-9);

double median(std::vector<double> values);

}  // namespace pks::jko
