#include "pks/energy/inequalities.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "pks/core/moments.hpp"
#include "pks/energy/calibrated_constants.hpp"
#include "pks/energy/functionals.hpp"
#include "pks/energy/random_fields.hpp"

namespace pks::energy {

namespace {

bool within(double lhs, double rhs) {
  return lhs <= rhs + kInequalitySlack * (std::abs(lhs) + std::abs(rhs));
}

}  // namespace

InequalityCheck carleman_check(const Grid& grid, std::span<const double> field) {
  double abs_ent = 0.0, ent = 0.0;
  for (double v : field) {
    if (v <= 0.0) continue;
    double t = v * std::log(v);
    abs_ent += std::abs(t);
    ent += t;
  }
  const double area = grid.cell_area();
  InequalityCheck c;
  c.lhs = abs_ent * area;
  c.rhs = ent * area + field_second_moment(grid, field) +
          2.0 * std::log(2.0 * std::numbers::pi) * field_mass(grid, field) + 2.0 / std::numbers::e;
  c.holds = within(c.lhs, c.rhs);
  return c;
}

BhnTerms bhn_terms(const Grid& grid, std::span<const double> field) {
  BhnTerms t{0.0, 0.0, 0.0, 0.0};
  for (double v : field) {
    t.l2_squared += v * v;
    if (v > 0.0) t.entropy_l1 += std::abs(v * std::log(v));
    t.mass += v;
  }
  const double area = grid.cell_area();
  t.l2_squared *= area;
  t.entropy_l1 *= area;
  t.mass *= area;
  t.fisher = fisher_information(grid, field);
  return t;
}

double bhn_constant(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("bhn_check: eps must be > 0");
  const CalibratedConstant* best = nullptr;
  for (const auto& c : kBhnConstants)
    if (c.parameter <= eps && (!best || c.parameter > best->parameter)) best = &c;
  if (!best) {
    throw std::invalid_argument("bhn_check: no calibrated L_eps for eps = " + std::to_string(eps) +
                                " (smallest tabulated eps is " +
                                std::to_string(kBhnConstants[0].parameter) + ")");
  }
  return best->value;
}

InequalityCheck bhn_check(const Grid& grid, std::span<const double> field, double eps) {
  const double L = bhn_constant(eps);
  BhnTerms t = bhn_terms(grid, field);
  InequalityCheck c;
  c.lhs = t.l2_squared;
  c.rhs = eps * t.fisher * t.entropy_l1 + L * t.mass;
  c.holds = within(c.lhs, c.rhs);
  return c;
}

GnsTerms gns_terms(const Grid& grid, std::span<const double> field, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("gns_check: p must be >= 1");
  GnsTerms t{0.0, 0.0, 0.0};
  for (double v : field) {
    t.lp_norm += std::pow(std::abs(v), p);
    t.l1_norm += std::abs(v);
  }
  const double area = grid.cell_area();
  t.lp_norm = std::pow(t.lp_norm * area, 1.0 / p);
  t.l1_norm *= area;
  t.fisher = fisher_information(grid, field);
  return t;
}

double gns_constant(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("gns_check: p must be >= 1");
  if (p == 1.0) return 1.0;
  for (const auto& c : kGnsConstants)
    if (std::abs(c.parameter - p) <= 1e-12 * p) return c.value;
  throw std::invalid_argument("gns_check: no calibrated C_p for p = " + std::to_string(p));
}

InequalityCheck gns_check(const Grid& grid, std::span<const double> field, double p) {
  const double C = gns_constant(p);
  GnsTerms t = gns_terms(grid, field, p);
  InequalityCheck c;
  c.lhs = t.lp_norm;
  c.rhs = C * std::pow(t.l1_norm, 1.0 / p) * std::pow(t.fisher, 1.0 - 1.0 / p);
  c.holds = within(c.lhs, c.rhs);
  return c;
}

std::vector<CalibrationMember> calibration_family() {
  std::vector<CalibrationMember> out;
  for (int k = 0; k <= 14; ++k) {
    double sigma = 0.5 + 0.25 * k;
    Grid g(std::max(4.0, 5.0 * sigma), 64);
    out.push_back({g, make_gaussian(g, {0.0, 0.0}, sigma, 1.0), "gaussian s=" + std::to_string(sigma)});
  }
  const Grid base(4.0, 64);
  out.push_back({base, make_uniform(base, 1.0), "uniform grid"});
  for (double side : {0.5, 1.0, 2.0, 4.0, 6.0})
    out.push_back({base, uniform_box(base, 0.0, 0.0, side), "box side=" + std::to_string(side)});
  std::mt19937_64 rng(kCalibrationSeed);
  for (int k = 0; k < kCalibrationRandomDraws; ++k)
    out.push_back({base, random_smooth_density(base, rng), "random #" + std::to_string(k)});
  return out;
}

}  // namespace pks::energy
