#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pks/core/interaction.hpp"

namespace pks {

// Sorted 0-based species indices.
using IndexSet = std::vector<std::size_t>;

enum class MassKind { Subcritical, Critical, Supercritical };

struct MassClass {
  MassKind kind = MassKind::Subcritical;
  // Critical: every J with Lambda_J = 0. Supercritical: one J of minimal size
  // with Lambda_J < 0. Subcritical: empty.
  std::vector<IndexSet> witnesses;
};

// Largest n accepted by classify_mass.
inline constexpr std::size_t kMaxClassifySpecies = 20;

// Lambda_J(beta) = sum_{i in J} beta_i (8 pi - sum_{j in J} a_ij beta_j).
double lambda_subset(std::span<const double> beta, const InteractionMatrix& a, const IndexSet& J);

// Lambda_J is treated as zero when |Lambda_J| <= kCriticalRelTol times
// sum_{i in J} beta_i (8 pi + sum_{j in J} a_ij beta_j).
inline constexpr double kCriticalRelTol = 1e-12;

MassClass classify_mass(std::span<const double> beta, const InteractionMatrix& a);

// Predicted d/dt of the total second moment: Lambda_{1..n}(beta) / (2 pi).
double predicted_moment_slope(std::span<const double> beta, const InteractionMatrix& a);

std::string to_string(MassKind kind);
// "{1,2}" with 1-based indices.
std::string format_subset(const IndexSet& J);

}  // namespace pks
