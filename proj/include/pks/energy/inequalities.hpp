#pragma once

#include <span>
#include <string>
#include <vector>

#include "pks/core/grid.hpp"

namespace pks::energy {

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// Relative slack used by every `holds` flag.
inline constexpr double kInequalitySlack = 1e-12;

// lhs = int rho |ln rho|, rhs = int rho ln rho + M2 + 2 ln(2 pi) int rho + 2/e.
InequalityCheck carleman_check(const Grid& grid, std::span<const double> field);

struct BhnTerms {
  double l2_squared;   // ||rho||_2^2
  double fisher;       // ||grad rho / rho||^2_{L^2(rho)}
  double entropy_l1;   // ||rho ln rho||_1
  double mass;         // ||rho||_1
};
BhnTerms bhn_terms(const Grid& grid, std::span<const double> field);

// lhs = ||rho||_2^2, rhs = eps Fisher ||rho ln rho||_1 + L_eps ||rho||_1 with the
// calibrated L_eps of the largest tabulated eps' <= eps (L is nonincreasing in eps).
InequalityCheck bhn_check(const Grid& grid, std::span<const double> field, double eps);
double bhn_constant(double eps);

struct GnsTerms {
  double lp_norm;   // ||f||_p
  double l1_norm;   // ||f||_1
  double fisher;    // int |grad f|^2 / f
};
GnsTerms gns_terms(const Grid& grid, std::span<const double> field, double p);

// lhs = ||f||_p, rhs = C_p ||f||_1^{1/p} (int |grad f|^2/f)^{1-1/p}. C_1 = 1; other
// p must be in the calibrated table.
InequalityCheck gns_check(const Grid& grid, std::span<const double> field, double p);
double gns_constant(double p);

// The fixed family over which the constants are calibrated.
struct CalibrationMember {
  Grid grid;
  Field field;
  std::string label;
};
std::vector<CalibrationMember> calibration_family();

}  // namespace pks::energy
