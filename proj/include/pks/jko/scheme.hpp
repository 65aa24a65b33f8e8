#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pks/core/interaction.hpp"
#include "pks/core/multi_density.hpp"
#include "pks/jko/params.hpp"
#include "pks/jko/stepper.hpp"

namespace pks::jko {

// One row of the diagnostics series. Row 0 describes the initial state; its
// step fields (distances, ratios, iteration counts) are zero or NaN.
struct StepRecord {
  int step = 0;
  double t = 0.0;
  std::vector<double> mass;
  double second_moment = 0.0;
  double entropy = 0.0;           // H
  double positive_entropy = 0.0;  // H+ = sum int rho (ln rho)_+
  double abs_entropy = 0.0;       // sum int rho |ln rho|
  double free_energy = 0.0;
  double dissipation = 0.0;
  std::vector<double> species_dissipation;
  double step_distance_sq = 0.0;
  std::vector<double> species_distance_sq;
  double boundary_fraction = 0.0;  // largest species share in the boundary ring
  double max_cell_fraction = 0.0;  // largest max_p rho_i h^2 / beta_i
  double energy_decrease = 0.0;
  double production_ratio = 0.0;
  bool converged = true;
  int outer_iters = 0;
  int inner_iters = 0;
  long sinkhorn_iters = 0;
};

struct Snapshot {
  int step = 0;
  double t = 0.0;
  MultiDensity density;
};

// Step of length fraction * tau from the base point of step `step`.
struct DeGiorgiSample {
  int step = 0;
  double fraction = 0.0;
  double dissipation = 0.0;        // D_F at the interpolant
  double distance_sq_base = 0.0;   // squared distance to the base point
  // d^2 between the interpolant and rho^step, when requested.
  std::optional<double> gap_sq;
};

enum class RunStatus { Completed, HaltedBoundaryMass, HaltedBlowup };
std::string to_string(RunStatus status);

struct MonitorOptions {
  bool enabled = true;
  double boundary_fraction_limit = 1e-3;
  double cell_mass_limit = 0.5;       // of beta_i, in a single cell
  double entropy_growth_limit = 10.0; // H+ relative to its initial value
};

// Width of the ring of cells counted as boundary: max(1, N/16).
int boundary_ring_width(const Grid& grid);
double boundary_fraction(const MultiDensity& rho);
double max_cell_fraction(const MultiDensity& rho);

struct StepObserverArgs {
  int step;
  const StepReport& report;
  const StepRecord& record;
};
using StepObserver = std::function<void(const StepObserverArgs&)>;

struct RunOptions {
  int snapshot_every = 1;  // 0 keeps only the initial and final states
  // Intra-step times, as fractions of tau in (0, 1], at which the De Giorgi
  // interpolant is sampled on every step. Empty disables sampling.
  std::vector<double> degiorgi_fractions;
  bool degiorgi_gap = false;  // also measure d(interpolant, rho^k)
  MonitorOptions monitor;
  StepObserver observer;
};

struct Trajectory {
  Grid grid{1.0, 4};
  std::vector<double> beta;
  InteractionMatrix a = InteractionMatrix::zero(1);
  JkoParams params;
  std::vector<StepRecord> records;
  std::vector<Snapshot> snapshots;
  std::vector<DeGiorgiSample> degiorgi;
  RunStatus status = RunStatus::Completed;
  std::string halt_reason;
};

// Runs n_steps JKO steps from rho0, or fewer if the monitor halts the run.
// Throws std::invalid_argument on invalid initial data or a gated mass.
Trajectory run_scheme(const MultiDensity& rho0, const InteractionMatrix& a, const JkoParams& params,
                      int n_steps, const RunOptions& options = {});

}  // namespace pks::jko
