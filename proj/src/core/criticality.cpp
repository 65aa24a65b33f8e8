#include "pks/core/criticality.hpp"

#include <bit>
#include <cstdint>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pks {

namespace {

void check_beta(std::span<const double> beta, const InteractionMatrix& a) {
  if (beta.size() != a.size()) {
    throw std::invalid_argument("criticality: " + std::to_string(beta.size()) +
                                " masses for a " + std::to_string(a.size()) + "x" +
                                std::to_string(a.size()) + " matrix");
  }
  for (double b : beta) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw std::invalid_argument("criticality: masses must be finite and > 0");
    }
  }
}

struct LambdaValue {
  double value;
  double scale;
};

LambdaValue lambda_mask(std::span<const double> beta, const InteractionMatrix& a,
                        std::uint32_t mask) {
  constexpr double eight_pi = 8.0 * std::numbers::pi;
  const std::size_t n = beta.size();
  double value = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(mask >> i & 1u)) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (mask >> j & 1u) s += a(i, j) * beta[j];
    value += beta[i] * (eight_pi - s);
    scale += beta[i] * (eight_pi + s);
  }
  return {value, scale};
}

IndexSet mask_to_set(std::uint32_t mask) {
  IndexSet J;
  for (std::size_t i = 0; i < 32; ++i)
    if (mask >> i & 1u) J.push_back(i);
  return J;
}

}  // namespace

double lambda_subset(std::span<const double> beta, const InteractionMatrix& a, const IndexSet& J) {
  check_beta(beta, a);
  if (J.empty()) throw std::invalid_argument("lambda_subset: J must be nonempty");
  if (beta.size() > 32) throw std::invalid_argument("lambda_subset: too many species");
  std::uint32_t mask = 0;
  for (std::size_t i : J) {
    if (i >= beta.size()) {
      throw std::invalid_argument("lambda_subset: index " + std::to_string(i + 1) +
                                  " out of range");
    }
    if (mask >> i & 1u) throw std::invalid_argument("lambda_subset: repeated index in J");
    mask |= 1u << i;
  }
  return lambda_mask(beta, a, mask).value;
}

MassClass classify_mass(std::span<const double> beta, const InteractionMatrix& a) {
  check_beta(beta, a);
  const std::size_t n = beta.size();
  if (n > kMaxClassifySpecies) {
    throw std::invalid_argument("classify_mass: n = " + std::to_string(n) +
                                " exceeds the exhaustive-search cap of 20");
  }
  const std::uint32_t full = (1u << n) - 1u;
  MassClass out;
  std::uint32_t witness = 0;
  int witness_size = 0;
  std::vector<IndexSet> zeros;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    LambdaValue lv = lambda_mask(beta, a, mask);
    bool zero = std::abs(lv.value) <= kCriticalRelTol * lv.scale;
    if (zero) {
      zeros.push_back(mask_to_set(mask));
    } else if (lv.value < 0.0) {
      int size = std::popcount(mask);
      if (witness == 0 || size < witness_size) {
        witness = mask;
        witness_size = size;
      }
    }
  }
  if (witness != 0) {
    out.kind = MassKind::Supercritical;
    out.witnesses.push_back(mask_to_set(witness));
  } else if (!zeros.empty()) {
    out.kind = MassKind::Critical;
    out.witnesses = std::move(zeros);
  }
  return out;
}

double predicted_moment_slope(std::span<const double> beta, const InteractionMatrix& a) {
  check_beta(beta, a);
  IndexSet all(beta.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return lambda_subset(beta, a, all) / (2.0 * std::numbers::pi);
}

std::string to_string(MassKind kind) {
  switch (kind) {
    case MassKind::Subcritical: return "Subcritical";
    case MassKind::Critical: return "Critical";
    case MassKind::Supercritical: return "Supercritical";
  }
  return "?";
}

std::string format_subset(const IndexSet& J) {
  std::string s = "{";
  for (std::size_t k = 0; k < J.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(J[k] + 1);
  }
  return s + "}";
}

}  // namespace pks
