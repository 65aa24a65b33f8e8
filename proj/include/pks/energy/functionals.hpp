#pragma once

#include <span>
#include <vector>

#include "pks/core/interaction.hpp"
#include "pks/core/multi_density.hpp"
#include "pks/energy/potential.hpp"

namespace pks::energy {

struct EnergyReport {
  double entropy = 0.0;
  double interaction = 0.0;
  double free_energy = 0.0;
  double dissipation = 0.0;  // left at 0 by free_energy()
  std::vector<double> species_entropy;
};

// Floor for the grad(rho)/rho quotient, relative to max(rho).
inline constexpr double kQuotientFloor = 1e-12;

// sum phi(rho) h^2 with phi(s) = s ln s, phi(0) = 0.
double field_entropy(const Grid& grid, std::span<const double> rho);
// sum rho (ln rho)_+ h^2
double field_positive_entropy(const Grid& grid, std::span<const double> rho);
double entropy(const MultiDensity& rho);

// -(1/2) sum_ij a_ij sum u_j rho_i h^2.
double interaction_energy(const MultiDensity& rho, const InteractionMatrix& a,
                          const std::vector<Field>& potentials);
double interaction_energy(const MultiDensity& rho, const InteractionMatrix& a);

EnergyReport free_energy(const MultiDensity& rho, const InteractionMatrix& a,
                         const std::vector<Field>& potentials);
EnergyReport free_energy(const MultiDensity& rho, const InteractionMatrix& a);

// Per-species terms of D_F; `potentials` are the species potentials u_j.
std::vector<double> dissipation_per_species(const MultiDensity& rho, const InteractionMatrix& a,
                                            const std::vector<Field>& potentials);
double dissipation(const MultiDensity& rho, const InteractionMatrix& a,
                   const std::vector<Field>& potentials);
double dissipation(const MultiDensity& rho, const InteractionMatrix& a);

// sum |grad f / max(f, floor)|^2 f h^2, the a = 0 single-species dissipation.
double fisher_information(const Grid& grid, std::span<const double> f);

}  // namespace pks::energy
