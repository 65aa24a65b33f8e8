// Regenerates include/pks/energy/calibrated_constants.hpp:
//   pks_calibrate > include/pks/energy/calibrated_constants.hpp
// L_eps and C_p are the suprema over calibration_family() times the safety factor.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "pks/energy/calibrated_constants.hpp"
#include "pks/energy/inequalities.hpp"

using namespace pks::energy;

int main() {
  const std::vector<CalibrationMember> family = calibration_family();
  const double eps_table[] = {0.01, 0.1, 1.0};
  const double p_table[] = {1.5, 2.0, 3.0, 4.0};

  std::vector<double> bhn_sup, gns_sup;
  for (double eps : eps_table) {
    double sup = 0.0;
    for (const auto& m : family) {
      BhnTerms t = bhn_terms(m.grid, m.field);
      sup = std::max(sup, (t.l2_squared - eps * t.fisher * t.entropy_l1) / t.mass);
    }
    bhn_sup.push_back(sup);
  }
  for (double p : p_table) {
    double sup = 0.0;
    for (const auto& m : family) {
      GnsTerms t = gns_terms(m.grid, m.field, p);
      if (!(t.fisher > 0.0)) continue;  // constant field on the whole box: no finite C_p
      double denom = std::pow(t.l1_norm, 1.0 / p) * std::pow(t.fisher, 1.0 - 1.0 / p);
      sup = std::max(sup, t.lp_norm / denom);
    }
    gns_sup.push_back(sup);
  }

  std::printf("#pragma once\n\n");
  std::printf("// Generated by tools/calibrate_constants.cpp; do not edit by hand.\n");
  std::printf("// Family: Gaussians s = 0.5..4 (N = 64, L = max(4, 5s)), the uniform field and\n");
  std::printf("// centered boxes on N = 64, L = 4, and %d random smooth densities (seed %llu).\n",
              kCalibrationRandomDraws, static_cast<unsigned long long>(kCalibrationSeed));
  std::printf("// value = %.1f x family supremum. All members have unit mass.\n\n",
              kCalibrationSafetyFactor);
  std::printf("#include <cstdint>\n\nnamespace pks::energy {\n\n");
  std::printf("struct CalibratedConstant {\n  double parameter;\n  double value;\n  double family_sup;\n};\n\n");
  std::printf("inline constexpr std::uint64_t kCalibrationSeed = %lluULL;\n",
              static_cast<unsigned long long>(kCalibrationSeed));
  std::printf("inline constexpr int kCalibrationRandomDraws = %d;\n", kCalibrationRandomDraws);
  std::printf("inline constexpr double kCalibrationSafetyFactor = %.1f;\n\n", kCalibrationSafetyFactor);
  std::printf("// L_eps, keyed by eps.\ninline constexpr CalibratedConstant kBhnConstants[] = {\n");
  for (std::size_t k = 0; k < bhn_sup.size(); ++k)
    std::printf("    {%.17g, %.17g, %.17g},\n", eps_table[k], kCalibrationSafetyFactor * bhn_sup[k],
                bhn_sup[k]);
  std::printf("};\n\n// C_p, keyed by p.\ninline constexpr CalibratedConstant kGnsConstants[] = {\n");
  for (std::size_t k = 0; k < gns_sup.size(); ++k)
    std::printf("    {%.17g, %.17g, %.17g},\n", p_table[k], kCalibrationSafetyFactor * gns_sup[k],
                gns_sup[k]);
  std::printf("};\n\n}  // namespace pks::energy\n");
  return 0;
}
