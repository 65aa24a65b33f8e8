#pragma once

// Generated by tools/calibrate_constants.cpp; do not edit by hand.
// Family: Gaussians s = 0.5..4 (N = 64, L = max(4, 5s)), the uniform field and
// centered boxes on N = 64, L = 4, and 400 random smooth densities (seed 20261014).
// value = 2.0 x family supremum. All members have unit mass.

#include <cstdint>

namespace pks::energy {

struct CalibratedConstant {
  double parameter;
  double value;
  double family_sup;
};

inline constexpr std::uint64_t kCalibrationSeed = 20261014ULL;
inline constexpr int kCalibrationRandomDraws = 400;
inline constexpr double kCalibrationSafetyFactor = 2.0;

// L_eps, keyed by eps.
inline constexpr CalibratedConstant kBhnConstants[] = {
    {0.01, 7.5563858044416348, 3.7781929022208174},
    {0.10000000000000001, 3.5638580444163503, 1.7819290222081752},
    {1, 2, 1},
};

// C_p, keyed by p.
inline constexpr CalibratedConstant kGnsConstants[] = {
    {1.5, 1.259921049894873, 0.62996052494743648},
    {2, 1, 0.5},
    {3, 0.79370052598409957, 0.39685026299204978},
    {4, 0.70710678118654757, 0.35355339059327379},
};

}  // namespace pks::energy
