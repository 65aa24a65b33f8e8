#include <algorithm>
#include <stdexcept>
#include <cmath>
#include <limits>
#include <random>

#include "brute_force_lp.hpp"
#include "doctest.h"
#include "pks/core/moments.hpp"
#include "pks/energy/random_fields.hpp"
#include "pks/simd/kernels.hpp"
#include "pks/transport/distance.hpp"
#include "pks/transport/exact_lp.hpp"
#include "pks/transport/log_convolution.hpp"
#include "pks/transport/sinkhorn.hpp"

using namespace pks;
using namespace pks::transport;

TEST_CASE("exact LP equals brute force on 3-point supports") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Point2 xs[3], ys[3];
    double a[3], b[3], sa = 0, sb = 0;
    for (int k = 0; k < 3; ++k) {
      xs[k] = {u(rng) * 4 - 2, u(rng) * 4 - 2};
      ys[k] = {u(rng) * 4 - 2, u(rng) * 4 - 2};
      a[k] = 0.05 + u(rng);
      b[k] = 0.05 + u(rng);
      sa += a[k];
      sb += b[k];
    }
    for (int k = 0; k < 3; ++k) {
      a[k] /= sa;
      b[k] /= sb;
    }
    const double want = test::brute_force_3x3(xs, a, ys, b);
    const double got = exact_transport_cost(xs, a, ys, b);
    CAPTURE(trial);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("exact LP known values") {
  Point2 x[2] = {{0, 0}, {1, 0}}, y[2] = {{0, 1}, {1, 1}};
  double w[2] = {0.5, 0.5};
  CHECK(exact_transport_cost(x, w, y, w) == doctest::Approx(1.0));
  Grid g(1.0, 8);
  Field mu(g.size(), 0.0), nu(g.size(), 0.0);
  mu[g.index(1, 1)] = 1.0;
  nu[g.index(4, 1)] = 1.0;
  // One cell each, 3h apart; mass in units of h^2.
  CHECK(exact_w2_lp(g, mu, nu) == doctest::Approx(g.cell_area() * 9 * g.cell_area()));
  CHECK(exact_w2_lp(g, mu, mu) == 0.0);
}

TEST_CASE("log convolution matches a direct log-sum-exp") {
  Grid g(1.0, 10);
  const double eps = 0.05;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-40.0, 3.0);
  Field in(g.size());
  for (double& v : in) v = u(rng);
  for (const simd::KernelTable* k : {&simd::scalar_kernels(), simd::avx2_kernels()}) {
    if (!k) continue;
    GaussianLogConvolution conv(g, eps, k);
    Field out(g.size());
    conv.apply(in, out);
    const int n = g.cells();
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        double m = -std::numeric_limits<double>::infinity();
        std::vector<double> t;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            double dx = g.center(a) - g.center(p), dy = g.center(b) - g.center(q);
            t.push_back(in[g.index(a, b)] - (dx * dx + dy * dy) / eps);
            m = std::max(m, t.back());
          }
        double s = 0.0;
        for (double v : t) s += std::exp(v - m);
        CHECK(out[g.index(p, q)] == doctest::Approx(m + std::log(s)).epsilon(1e-12));
      }
  }
}

TEST_CASE("debiased sinkhorn: identical measures and translations") {
  Grid g(4.0, 64);
  const double beta = 3.0;
  Field a = make_gaussian(g, {-0.5, 0.0}, 0.6, beta);
  Field b = make_gaussian(g, {0.5, 0.25}, 0.6, beta);
  SinkhornOptions o;
  o.tol = 1e-10;
  CHECK(sinkhorn_w2(g, a, a, o).w2_squared <= 1e-12);
  TransportResult r = sinkhorn_w2(g, a, b, o);
  CHECK(r.converged);
  CHECK(r.marginal_error <= 1e-10);
  // Translation: the debiased divergence equals beta |shift|^2.
  CHECK(r.w2_squared == doctest::Approx(beta * 1.0625).epsilon(1e-6));
  CHECK_THROWS_AS(sinkhorn_w2(g, a, make_gaussian(g, {0, 0}, 0.6, 1.0), o), std::invalid_argument);
}

TEST_CASE("sinkhorn kernels agree") {
  const simd::KernelTable* fast = simd::avx2_kernels();
  if (!fast) return;
  Grid g(2.0, 32);
  std::mt19937_64 rng(8);
  Field a = energy::random_smooth_density(g, rng), b = energy::random_smooth_density(g, rng);
  auto pa = probability_weights(g, a), pb = probability_weights(g, b);
  SinkhornSolver s1(g, g.cell_area(), &simd::scalar_kernels()), s2(g, g.cell_area(), fast);
  Field f1, g1, f2, g2;
  auto r1 = s1.solve_cross(pa, pb, f1, g1, 1e-10, 10000);
  auto r2 = s2.solve_cross(pa, pb, f2, g2, 1e-10, 10000);
  CHECK(r1.value == doctest::Approx(r2.value).epsilon(1e-9));
  CHECK(std::abs(r1.iterations - r2.iterations) <= 2);
}

TEST_CASE("product distance sums species") {
  Grid g(4.0, 48);
  Field a = make_gaussian(g, {0, 0}, 0.5, 2.0), b = make_gaussian(g, {0.5, 0}, 0.5, 2.0);
  MultiDensity r(g, {a, a}, {2.0, 2.0}), e(g, {a, b}, {2.0, 2.0});
  ProductDistance d = product_distance(r, e, 0.0, 1e-10);
  CHECK(d.species_squared[0] <= 1e-12);
  CHECK(d.species_squared[1] == doctest::Approx(2.0 * 0.25).epsilon(1e-6));
  CHECK(d.distance == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
}

TEST_CASE("sinkhorn against the exact LP on a small grid") {
  Grid g(1.0, 8);
  const double eps = g.cell_area() / 4;
  std::mt19937_64 rng(4);
  SinkhornOptions o;
  o.eps = eps;
  o.tol = 1e-10;
  for (int t = 0; t < 10; ++t) {
    Field a = energy::random_rough_density(g, rng), b = energy::random_rough_density(g, rng);
    const double s = sinkhorn_w2(g, a, b, o).w2_squared;
    CHECK(std::abs(s - exact_w2_lp(g, a, b)) <= 2 * eps + 1e-6);
  }
}
