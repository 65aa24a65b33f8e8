#include <cmath>
#include <stdexcept>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pks/core/moments.hpp"
#include "pks/energy/calibrated_constants.hpp"
#include "pks/energy/functionals.hpp"
#include "pks/energy/inequalities.hpp"
#include "pks/energy/potential.hpp"
#include "pks/energy/random_fields.hpp"

using namespace pks;
using namespace pks::energy;
constexpr double kPi = std::numbers::pi;

TEST_CASE("self-cell constant is the mean of ln|y| over the unit cell") {
  // Midpoint rule on a fine grid; the log singularity costs O(m^-2 log m).
  const int m = 4000;
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x = -0.5 + (i + 0.5) / m;
    for (int j = 0; j < m; ++j) {
      const double y = -0.5 + (j + 0.5) / m;
      s += 0.5 * std::log(x * x + y * y);
    }
  }
  CHECK(s / (double(m) * m) == doctest::Approx(kSelfCellLogMean).epsilon(1e-6));
}

TEST_CASE("FFT potential matches the direct sum") {
  Grid g(1.5, 12);
  std::mt19937_64 rng(3);
  Field rho = random_rough_density(g, rng, 2.0);
  LogKernelConvolver conv(g);
  Field u = conv.potential(rho);
  const double h = g.spacing(), h2 = g.cell_area();
  const int n = g.cells();
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          double k;
          if (a == p && b == q) {
            k = std::log(h) + kSelfCellLogMean;
          } else {
            double dx = g.center(a) - g.center(p), dy = g.center(b) - g.center(q);
            k = 0.5 * std::log(dx * dx + dy * dy);
          }
          s += k * rho[g.index(a, b)];
        }
      CHECK(u[g.index(p, q)] == doctest::Approx(-s * h2 / (2 * kPi)).epsilon(1e-11));
    }
}

TEST_CASE("potential of a radial bump outside its support") {
  Grid g(6.0, 96);
  const double beta = 3.0;
  Field rho = make_gaussian(g, {0.0, 0.0}, 0.3, beta);
  PotentialField u = newtonian_potential(g, rho);
  for (int p : {2, 10, 80}) {
    for (int q : {5, 48, 90}) {
      const double r = std::hypot(g.center(p), g.center(q));
      if (r < 3.0) continue;
      CHECK(u.values[g.index(p, q)] == doctest::Approx(-beta / (2 * kPi) * std::log(r)).epsilon(1e-6));
    }
  }
}

TEST_CASE("gaussian entropy and fisher information") {
  Grid g(8.0, 128);
  const double sigma = 1.0, beta = 2.0;
  Field f = make_gaussian(g, {0.0, 0.0}, sigma, beta);
  const double h_exact = beta * std::log(beta / (2 * kPi * sigma * sigma)) - beta;
  CHECK(field_entropy(g, f) == doctest::Approx(h_exact).epsilon(1e-9));
  // Centered differences: relative error about h^2 / (3 sigma^2) ~ 5e-3 here.
  CHECK(fisher_information(g, f) == doctest::Approx(2 * beta / (sigma * sigma)).epsilon(1e-2));
  MultiDensity rho(g, {f}, {beta});
  CHECK(dissipation(rho, InteractionMatrix::zero(1)) == doctest::Approx(fisher_information(g, f)));
}

TEST_CASE("positive entropy and free energy bookkeeping") {
  Grid g(2.0, 16);
  Field f = make_gaussian(g, {0.0, 0.0}, 0.3, 1.0);
  double hp = 0.0, h = 0.0;
  for (double v : f) {
    if (v > 1.0) hp += v * std::log(v);
    if (v > 0.0) h += v * std::log(v);
  }
  CHECK(field_positive_entropy(g, f) == doctest::Approx(hp * g.cell_area()));
  MultiDensity rho(g, {f, f}, {1.0, 1.0});
  auto a = InteractionMatrix::from_rows({{1, 0.5}, {0.5, 1}});
  EnergyReport r = free_energy(rho, a);
  CHECK(r.entropy == doctest::Approx(2 * h * g.cell_area()));
  CHECK(r.free_energy == doctest::Approx(r.entropy + r.interaction));
  // Identical species: -1/2 sum a_ij <rho, u> = -1/2 (1 + 0.5 + 0.5 + 1) <f, u_f>.
  LogKernelConvolver conv(g);
  Field u = conv.potential(f);
  double dot = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) dot += f[k] * u[k];
  CHECK(r.interaction == doctest::Approx(-0.5 * 3.0 * dot * g.cell_area()).epsilon(1e-12));
}

TEST_CASE("dissipation vanishes for the heat flow of a constant") {
  Grid g(1.0, 8);
  Field f = make_uniform(g, 1.0);
  MultiDensity rho(g, {f}, {1.0});
  CHECK(dissipation(rho, InteractionMatrix::zero(1)) == doctest::Approx(0.0));
}

TEST_CASE("carleman on gaussians") {
  for (double sigma : {0.2, 0.5, 1.0, 2.0}) {
    Grid g(std::max(4.0, 6 * sigma), 128);
    Field f = make_gaussian(g, {0.3, 0.0}, sigma, 1.0);
    InequalityCheck c = carleman_check(g, f);
    CAPTURE(sigma);
    CHECK(c.holds);
    CHECK(c.lhs < c.rhs);
  }
}

TEST_CASE("calibrated constants cover their family") {
  auto family = calibration_family();
  CHECK(family.size() == 15 + 1 + 5 + kCalibrationRandomDraws);
  for (const auto& c : kBhnConstants) {
    CHECK(c.value >= c.family_sup);
    for (std::size_t k = 0; k < family.size(); k += 7) CHECK(bhn_check(family[k].grid, family[k].field, c.parameter).holds);
  }
  for (const auto& c : kGnsConstants) {
    CHECK(c.value >= c.family_sup);
    for (std::size_t k = 0; k < family.size(); k += 7) {
      if (family[k].label == "uniform grid") continue;
      CHECK(gns_check(family[k].grid, family[k].field, c.parameter).holds);
    }
  }
  CHECK(bhn_constant(0.5) == kBhnConstants[1].value);
  CHECK_THROWS_AS(bhn_constant(0.001), std::invalid_argument);
  CHECK_THROWS_AS(gns_constant(2.5), std::invalid_argument);
}

TEST_CASE("random fields are seeded and normalized") {
  Grid g(4.0, 32);
  std::mt19937_64 r1(5), r2(5);
  Field a = random_smooth_density(g, r1, 2.0), b = random_smooth_density(g, r2, 2.0);
  CHECK(a == b);
  CHECK(field_mass(g, a) == doctest::Approx(2.0).epsilon(1e-14));
  Field box = uniform_box(g, 0.0, 0.0, 2.0);
  CHECK(field_mass(g, box) == doctest::Approx(1.0).epsilon(1e-14));
}
