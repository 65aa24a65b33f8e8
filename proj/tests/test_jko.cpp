#include <cmath>
#include <stdexcept>
#include <numbers>

#include "doctest.h"
#include "pks/core/moments.hpp"
#include "pks/jko/diagnostics.hpp"
#include "pks/jko/scheme.hpp"
#include "pks/jko/stepper.hpp"

using namespace pks;
using namespace pks::jko;
constexpr double kPi = std::numbers::pi;

namespace {

double l1(const Grid& g, const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return s * g.cell_area();
}

JkoParams heat_params() {
  JkoParams p;
  p.tau = 1e-3;
  return p;
}

}  // namespace

TEST_CASE("one heat step tracks the analytic solution") {
  Grid g(4.0, 64);
  const double sigma = 0.5;
  MultiDensity rho(g, {make_gaussian(g, {0, 0}, sigma, 1.0)}, {1.0});
  JkoParams p = heat_params();
  StepResult r = jko_step(rho, InteractionMatrix::zero(1), p);
  CHECK(r.report.converged);
  CHECK(std::abs(mass(r.density, 0) - 1.0) <= 1e-12);
  Field exact = make_gaussian(g, {0, 0}, std::sqrt(sigma * sigma + 2 * p.tau), 1.0);
  CHECK(l1(g, r.density.field(0), exact) <= 2e-4);
  // Second moment grows by 4 tau for unit mass.
  CHECK(second_moment(r.density) - second_moment(rho) == doctest::Approx(4 * p.tau).epsilon(0.02));
  CHECK(r.report.energy_after < r.report.energy_before);
  CHECK(r.report.energy_decrease >= -1e-6);
  CHECK(r.report.production_ratio == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("stepper results do not depend on call history") {
  Grid g(4.0, 32);
  MultiDensity rho(g, {make_gaussian(g, {0.3, 0}, 0.6, 1.0)}, {1.0});
  JkoStepper s(g, InteractionMatrix::zero(1), heat_params());
  StepResult a = s.step(rho);
  StepResult other = s.step(a.density);
  StepResult b = s.step(rho);
  CHECK(a.density == b.density);
  CHECK(other.density != a.density);
}

TEST_CASE("supercritical masses are refused unless overridden") {
  Grid g(4.0, 32);
  const double beta = 12 * kPi;
  MultiDensity rho(g, {make_gaussian(g, {0, 0}, 0.7, beta)}, {beta});
  auto a = InteractionMatrix::from_rows({{1}});
  JkoParams p = heat_params();
  CHECK_THROWS_AS(jko_step(rho, a, p), std::invalid_argument);
  try {
    jko_step(rho, a, p);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("{1}") != std::string::npos);
  }
  p.allow_supercritical = true;
  CHECK_NOTHROW(jko_step(rho, a, p));
}

TEST_CASE("coupled two-species step") {
  Grid g(4.0, 32);
  const double beta = 4 * kPi;
  MultiDensity rho(g, {make_gaussian(g, {-0.5, 0}, 0.7, beta), make_gaussian(g, {0.5, 0}, 0.7, beta)},
                   {beta, beta});
  auto a = InteractionMatrix::from_rows({{1, 0.5}, {0.5, 1}});
  StepResult r = jko_step(rho, a, heat_params());
  CHECK(r.report.converged);
  CHECK(r.report.outer_iters >= 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(mass(r.density, i) - beta) <= 1e-10 * beta);
  CHECK(r.report.energy_decrease >= -1e-6);
  CHECK(r.report.species_distance_sq.size() == 2);
}

TEST_CASE("de giorgi interpolation validates the elapsed time") {
  Grid g(4.0, 32);
  MultiDensity rho(g, {make_gaussian(g, {0, 0}, 0.6, 1.0)}, {1.0});
  JkoParams p = heat_params();
  CHECK_THROWS_AS(de_giorgi_interpolate(rho, InteractionMatrix::zero(1), p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(de_giorgi_interpolate(rho, InteractionMatrix::zero(1), p, 2 * p.tau), std::invalid_argument);
  MultiDensity half = de_giorgi_interpolate(rho, InteractionMatrix::zero(1), p, 0.5 * p.tau);
  MultiDensity full = jko_step(rho, InteractionMatrix::zero(1), p).density;
  // The half-time minimizer spreads half as far.
  const double m0 = second_moment(rho);
  CHECK((second_moment(half) - m0) / (second_moment(full) - m0) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("bad parameters are rejected") {
  JkoParams p;
  p.tau = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = JkoParams{};
  p.eps = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = JkoParams{};
  p.max_inner = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("monitors") {
  Grid g(2.0, 64);
  CHECK(boundary_ring_width(g) == 4);
  CHECK(boundary_ring_width(Grid(2.0, 8)) == 1);
  MultiDensity u(g, {make_uniform(g, 1.0)}, {1.0});
  // Ring of width 4 on 64 cells: 1 - (56/64)^2.
  CHECK(boundary_fraction(u) == doctest::Approx(1.0 - 56.0 * 56.0 / (64.0 * 64.0)));
  CHECK(max_cell_fraction(u) == doctest::Approx(1.0 / 4096));
}

TEST_CASE("run_scheme counting and observer") {
  Grid g(4.0, 32);
  MultiDensity rho(g, {make_gaussian(g, {0, 0}, 0.6, 1.0)}, {1.0});
  RunOptions o;
  int seen = 0;
  o.observer = [&](const StepObserverArgs& a) { seen = a.step; };
  o.degiorgi_fractions = {0.5};
  Trajectory tr = run_scheme(rho, InteractionMatrix::zero(1), heat_params(), 3, o);
  CHECK(tr.status == RunStatus::Completed);
  CHECK(tr.records.size() == 4);
  CHECK(tr.snapshots.size() == 4);
  CHECK(tr.degiorgi.size() == 3);
  CHECK(seen == 3);
  CHECK(tr.records[0].t == 0.0);
  CHECK(tr.records[3].t == doctest::Approx(3e-3));
  o.snapshot_every = 0;
  tr = run_scheme(rho, InteractionMatrix::zero(1), heat_params(), 3, o);
  CHECK(tr.snapshots.size() == 2);
}

TEST_CASE("blow-up monitor halts a collapsing run") {
  Grid g(2.0, 32);
  const double beta = 24 * kPi;
  MultiDensity rho(g, {make_gaussian(g, {0, 0}, 0.25, beta)}, {beta});
  JkoParams p = heat_params();
  p.tau = 2e-3;
  p.allow_supercritical = true;
  RunOptions o;
  o.snapshot_every = 0;
  Trajectory tr = run_scheme(rho, InteractionMatrix::from_rows({{1}}), p, 200, o);
  CHECK(tr.status == RunStatus::HaltedBlowup);
  CHECK_FALSE(tr.halt_reason.empty());
  CHECK(tr.records.size() < 201);
  CHECK(tr.snapshots.back().step == tr.records.back().step);
}

TEST_CASE("diagnostics on a synthetic trajectory") {
  Trajectory tr;
  tr.beta = {4 * kPi};
  tr.a = InteractionMatrix::from_rows({{1}});
  tr.params.tau = 0.1;
  for (int k = 0; k <= 10; ++k) {
    StepRecord r;
    r.step = k;
    r.t = 0.1 * k;
    r.second_moment = 3.0 + 8 * kPi * r.t;
    r.free_energy = 10.0 - k;         // drop 1 per step
    r.dissipation = 20.0;             // tau D / 2 + tau D / 2 = 2 per step
    r.step_distance_sq = 0.2 * 0.9;   // d^2 / (2 tau) = 0.9 <= 1
    r.energy_decrease = 1.0 - 0.9;
    tr.records.push_back(r);
  }
  SlopeCheck s = slope_check(tr);
  CHECK(s.measured == doctest::Approx(8 * kPi));
  CHECK(s.rel_error < 1e-12);
  CHECK(s.samples == 11);

  EnergyInequalityCheck ei = energy_inequality_check(tr);
  CHECK(ei.step_holds);
  CHECK(ei.telescoped_holds);
  CHECK(ei.min_telescoped_margin == doctest::Approx(0.1 + 1e-6));

  EnergyIdentityReport id = energy_identity_report(tr);
  CHECK(id.quadrature == "trapezoid (endpoints only)");
  CHECK(id.piecewise_term == doctest::Approx(10 * 0.5 * 0.1 * 20));
  CHECK(id.interpolant_term == doctest::Approx(10 * 0.5 * 0.1 * 20));
  CHECK(id.defect == doctest::Approx(20.0 - 10.0));
  CHECK_FALSE(id.holds);

  for (int k = 1; k <= 10; ++k) tr.degiorgi.push_back({k, 0.5, 5.0, 0.0, std::nullopt});
  id = energy_identity_report(tr);
  CHECK(id.quadrature == "simpson");
  CHECK(id.interpolant_term == doctest::Approx(10 * 0.5 * 0.1 / 6 * (20 + 4 * 5 + 20)));

  ProductionSeries pc = production_check(tr);
  CHECK(pc.median == doctest::Approx(0.18 / 0.01 / 20));

  tr.records[6].boundary_fraction = 0.5;
  SlopeWindow w = pre_halt_window(tr);
  CHECK(w.last == 5);
  tr.status = RunStatus::HaltedBlowup;
  tr.records[6].boundary_fraction = 0.0;
  CHECK(pre_halt_window(tr).last == 9);
  tr.records.resize(4);
  tr.status = RunStatus::Completed;
  CHECK_THROWS_AS(slope_check(tr), std::invalid_argument);
}

TEST_CASE("median ignores non-finite values") {
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK(median({1, std::nan(""), 3}) == 2);
  CHECK(std::isnan(median({})));
}
