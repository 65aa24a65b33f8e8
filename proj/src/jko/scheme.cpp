#include "pks/jko/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pks/core/moments.hpp"
#include "pks/energy/functionals.hpp"
#include "pks/energy/potential.hpp"
#include "pks/transport/distance.hpp"

namespace pks::jko {

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::HaltedBoundaryMass: return "halted_boundary_mass";
    case RunStatus::HaltedBlowup: return "halted_blowup";
  }
  return "unknown";
}

int boundary_ring_width(const Grid& grid) { return std::max(1, grid.cells() / 16); }

double boundary_fraction(const MultiDensity& rho) {
  const Grid& g = rho.grid();
  const int n = g.cells();
  const int w = boundary_ring_width(g);
  double worst = 0.0;
  for (std::size_t i = 0; i < rho.species(); ++i) {
    const Field& f = rho.field(i);
    double ring = 0.0, total = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) {
        const double v = f[g.index(p, q)];
        total += v;
        if (p < w || q < w || p >= n - w || q >= n - w) ring += v;
      }
    }
    if (total > 0.0) worst = std::max(worst, ring / total);
  }
  return worst;
}

double max_cell_fraction(const MultiDensity& rho) {
  const double h2 = rho.grid().cell_area();
  double worst = 0.0;
  for (std::size_t i = 0; i < rho.species(); ++i) {
    const Field& f = rho.field(i);
    worst = std::max(worst, *std::max_element(f.begin(), f.end()) * h2 / rho.target_mass(i));
  }
  return worst;
}

namespace {

StepRecord state_record(const MultiDensity& rho, const InteractionMatrix& a,
                        const energy::LogKernelConvolver& conv) {
  StepRecord r;
  const Grid& g = rho.grid();
  std::vector<Field> u;
  if (!a.is_zero()) u = energy::species_potentials(rho, conv);
  else u.assign(rho.species(), Field());
  auto e = energy::free_energy(rho, a, u);
  r.entropy = e.entropy;
  r.free_energy = e.free_energy;
  r.species_dissipation = energy::dissipation_per_species(rho, a, u);
  for (double d : r.species_dissipation) r.dissipation += d;
  for (std::size_t i = 0; i < rho.species(); ++i) {
    r.mass.push_back(mass(rho, i));
    r.positive_entropy += energy::field_positive_entropy(g, rho.field(i));
  }
  r.abs_entropy = 2.0 * r.positive_entropy - r.entropy;
  r.second_moment = second_moment(rho);
  r.boundary_fraction = boundary_fraction(rho);
  r.max_cell_fraction = max_cell_fraction(rho);
  return r;
}

void validate_initial(const StepRecord& r) {
  if (!std::isfinite(r.entropy) || !std::isfinite(r.second_moment) ||
      !std::isfinite(r.free_energy))
    throw std::invalid_argument("run_scheme: initial data must have finite entropy, energy and M2");
}

}  // namespace

Trajectory run_scheme(const MultiDensity& rho0, const InteractionMatrix& a, const JkoParams& params,
                      int n_steps, const RunOptions& options) {
  if (n_steps < 0) throw std::invalid_argument("run_scheme: n_steps must be >= 0");
  if (options.snapshot_every < 0) throw std::invalid_argument("run_scheme: snapshot_every must be >= 0");
  for (double f : options.degiorgi_fractions)
    if (!(f > 0.0) || f > 1.0)
      throw std::invalid_argument("run_scheme: De Giorgi fractions must lie in (0, 1]");
  params.validate();

  Trajectory tr{rho0.grid(), rho0.target_masses(), a, params, {}, {}, {}, RunStatus::Completed, {}};
  JkoStepper stepper(rho0.grid(), a, params);
  energy::LogKernelConvolver conv(rho0.grid());

  StepRecord r0 = state_record(rho0, a, conv);
  validate_initial(r0);
  r0.species_distance_sq.assign(rho0.species(), 0.0);
  r0.production_ratio = std::numeric_limits<double>::quiet_NaN();
  tr.records.push_back(r0);
  tr.snapshots.push_back({0, 0.0, rho0});
  const double h_plus0 = r0.positive_entropy;

  MultiDensity cur = rho0;
  for (int k = 1; k <= n_steps; ++k) {
    // Interpolants first: they share the cached base state with the step.
    std::vector<MultiDensity> interpolants;
    for (double frac : options.degiorgi_fractions) {
      StepResult dg = stepper.step(cur, frac * params.tau);
      if (options.degiorgi_gap) interpolants.push_back(std::move(dg.density));
      DeGiorgiSample s;
      s.step = k;
      s.fraction = frac;
      s.dissipation = dg.report.dissipation;
      s.distance_sq_base = dg.report.step_distance_sq;
      tr.degiorgi.push_back(std::move(s));
    }
    const std::size_t first_sample = tr.degiorgi.size() - options.degiorgi_fractions.size();

    StepResult res = stepper.step(cur);
    const StepReport& rep = res.report;
    StepRecord rec = state_record(res.density, a, conv);
    rec.step = k;
    rec.t = k * params.tau;
    rec.step_distance_sq = rep.step_distance_sq;
    rec.species_distance_sq = rep.species_distance_sq;
    rec.energy_decrease = rep.energy_decrease;
    rec.production_ratio = rep.production_ratio;
    rec.converged = rep.converged;
    rec.outer_iters = rep.outer_iters;
    rec.inner_iters = rep.inner_iters;
    rec.sinkhorn_iters = rep.sinkhorn_iters;

    for (std::size_t j = 0; j < interpolants.size(); ++j) {
      auto d = transport::product_distance(interpolants[j], res.density, stepper.eps(),
                                           params.report_tol);
      tr.degiorgi[first_sample + j].gap_sq = d.distance * d.distance;
    }

    cur = std::move(res.density);
    tr.records.push_back(rec);
    if (options.observer) options.observer({k, rep, tr.records.back()});

    if (options.monitor.enabled) {
      const MonitorOptions& m = options.monitor;
      if (rec.boundary_fraction > m.boundary_fraction_limit) {
        tr.status = RunStatus::HaltedBoundaryMass;
        tr.halt_reason = "boundary mass fraction " + std::to_string(rec.boundary_fraction) +
                         " exceeds " + std::to_string(m.boundary_fraction_limit);
      } else if (rec.max_cell_fraction > m.cell_mass_limit) {
        tr.status = RunStatus::HaltedBlowup;
        tr.halt_reason = "cell mass fraction " + std::to_string(rec.max_cell_fraction) +
                         " exceeds " + std::to_string(m.cell_mass_limit);
      } else if (h_plus0 > 0.0 && rec.positive_entropy > m.entropy_growth_limit * h_plus0) {
        tr.status = RunStatus::HaltedBlowup;
        tr.halt_reason = "H+ grew from " + std::to_string(h_plus0) + " to " +
                         std::to_string(rec.positive_entropy);
      }
    }
    const bool last = k == n_steps || tr.status != RunStatus::Completed;
    if (last || (options.snapshot_every > 0 && k % options.snapshot_every == 0))
      tr.snapshots.push_back({k, rec.t, cur});
    if (tr.status != RunStatus::Completed) break;
  }
  return tr;
}

}  // namespace pks::jko
