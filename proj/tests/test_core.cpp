#include <cmath>
#include <stdexcept>
#include <numbers>

#include "criticality_cases.hpp"
#include "doctest.h"
#include "pks/core/criticality.hpp"
#include "pks/core/grid.hpp"
#include "pks/core/interaction.hpp"
#include "pks/core/moments.hpp"
#include "pks/core/multi_density.hpp"

using namespace pks;
constexpr double kPi = std::numbers::pi;

TEST_CASE("grid geometry") {
  Grid g(2.0, 8);
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.cell_area() == doctest::Approx(0.25));
  CHECK(g.center(0) == doctest::Approx(-1.75));
  CHECK(g.center(7) == doctest::Approx(1.75));
  CHECK(g.index(1, 2) == 10);
  CHECK(g.size() == 64);
  CHECK_THROWS_AS(Grid(0.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1.0, 3), std::invalid_argument);
}

TEST_CASE("interaction matrix validation") {
  CHECK_NOTHROW(InteractionMatrix::from_rows({{1, 0.5}, {0.5, 1}}));
  CHECK_THROWS_AS(InteractionMatrix::from_rows({{1, 0.5}, {0.4, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(InteractionMatrix::from_rows({{-1}}), std::invalid_argument);
  CHECK_THROWS_AS(InteractionMatrix::from_rows({{1, 0}, {0}}), std::invalid_argument);
  CHECK(InteractionMatrix::zero(3).is_zero());
  CHECK_FALSE(InteractionMatrix::from_rows({{0, 1}, {1, 0}}).is_zero());
}

TEST_CASE("gaussian moments") {
  Grid g(8.0, 128);
  const double sigma = 1.0, beta = 3.0;
  Field f = make_gaussian(g, {0.5, -0.25}, sigma, beta);
  CHECK(field_mass(g, f) == doctest::Approx(beta).epsilon(1e-14));
  // M2 about the origin = beta (2 sigma^2 + |c|^2); point sampling of a smooth
  // bump makes the midpoint sum spectrally accurate.
  const double expect = beta * (2 * sigma * sigma + 0.25 + 0.0625);
  CHECK(field_second_moment(g, f) == doctest::Approx(expect).epsilon(1e-9));
  Field u = make_uniform(g, 2.0);
  CHECK(field_mass(g, u) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(u.front() == doctest::Approx(u.back()));
}

TEST_CASE("multi density validates masses") {
  Grid g(1.0, 4);
  Field f(16, 1.0 / 4.0);  // mass 1 on area 4
  CHECK_NOTHROW(MultiDensity(g, {f}, {1.0}));
  CHECK_THROWS_AS(MultiDensity(g, {f}, {2.0}), std::invalid_argument);
  CHECK_THROWS_AS(MultiDensity(g, {f, f}, {1.0}), std::invalid_argument);
  Field neg = f;
  neg[3] = -1.0;
  CHECK_THROWS_AS(MultiDensity(g, {neg}, {1.0}), std::invalid_argument);
  MultiDensity r = MultiDensity::rescaled(g, {f}, {5.0});
  CHECK(mass(r, 0) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("lambda subset hand values") {
  auto a = InteractionMatrix::from_rows({{1, 0.5}, {0.5, 1}});
  std::vector<double> beta{4 * kPi, 4 * kPi};
  CHECK(lambda_subset(beta, a, {0}) == doctest::Approx(16 * kPi * kPi));
  CHECK(lambda_subset(beta, a, {0, 1}) == doctest::Approx(16 * kPi * kPi));
  CHECK_THROWS_AS(lambda_subset(beta, a, {}), std::invalid_argument);
  CHECK_THROWS_AS(lambda_subset(beta, a, {2}), std::invalid_argument);
  CHECK_THROWS_AS(lambda_subset(beta, a, {0, 0}), std::invalid_argument);
}

TEST_CASE("classification suite") {
  for (const auto& c : test::criticality_cases()) {
    CAPTURE(c.name);
    auto beta = test::case_beta(c);
    MassClass mc = classify_mass(beta, InteractionMatrix::from_rows(c.a));
    CHECK(mc.kind == c.kind);
    CHECK(mc.witnesses == c.witnesses);
    CHECK(predicted_moment_slope(beta, InteractionMatrix::from_rows(c.a)) ==
          doctest::Approx(c.slope_over_pi * kPi).epsilon(1e-12));
  }
}

TEST_CASE("classification near the threshold") {
  auto a = InteractionMatrix::from_rows({{1}});
  std::vector<double> below{8 * kPi * (1 - 1e-9)}, above{8 * kPi * (1 + 1e-9)};
  CHECK(classify_mass(below, a).kind == MassKind::Subcritical);
  CHECK(classify_mass(above, a).kind == MassKind::Supercritical);
}

TEST_CASE("classification errors") {
  auto a = InteractionMatrix::from_rows({{1}});
  std::vector<double> zero{0.0}, two{1.0, 1.0};
  CHECK_THROWS_AS(classify_mass(zero, a), std::invalid_argument);
  CHECK_THROWS_AS(classify_mass(two, a), std::invalid_argument);
  std::vector<double> many(21, 1.0);
  CHECK_THROWS_AS(classify_mass(many, InteractionMatrix::zero(21)), std::invalid_argument);
  std::vector<double> twenty(20, 1.0);
  CHECK(classify_mass(twenty, InteractionMatrix::zero(20)).kind == MassKind::Subcritical);
}

TEST_CASE("subset formatting") {
  CHECK(format_subset({0, 2}) == "{1,3}");
  CHECK(to_string(MassKind::Critical) == "Critical");
}
