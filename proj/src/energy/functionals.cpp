#include "pks/energy/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pks/energy/gradient.hpp"

namespace pks::energy {

void gradient(const Grid& grid, std::span<const double> f, Field& gx, Field& gy) {
  const int n = grid.cells();
  const double h = grid.spacing();
  const double c = 0.5 / h, e = 1.0 / h;
  gx.assign(grid.size(), 0.0);
  gy.assign(grid.size(), 0.0);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      std::size_t k = grid.index(p, q);
      if (p == 0) gx[k] = e * (f[grid.index(1, q)] - f[k]);
      else if (p == n - 1) gx[k] = e * (f[k] - f[grid.index(n - 2, q)]);
      else gx[k] = c * (f[grid.index(p + 1, q)] - f[grid.index(p - 1, q)]);
      if (q == 0) gy[k] = e * (f[k + 1] - f[k]);
      else if (q == n - 1) gy[k] = e * (f[k] - f[k - 1]);
      else gy[k] = c * (f[k + 1] - f[k - 1]);
    }
  }
}

double field_entropy(const Grid& grid, std::span<const double> rho) {
  double s = 0.0;
  for (double v : rho)
    if (v > 0.0) s += v * std::log(v);
  return s * grid.cell_area();
}

double field_positive_entropy(const Grid& grid, std::span<const double> rho) {
  double s = 0.0;
  for (double v : rho)
    if (v > 1.0) s += v * std::log(v);
  return s * grid.cell_area();
}

double entropy(const MultiDensity& rho) {
  double s = 0.0;
  for (std::size_t i = 0; i < rho.species(); ++i) s += field_entropy(rho.grid(), rho.field(i));
  return s;
}

namespace {

void check_sizes(const MultiDensity& rho, const InteractionMatrix& a,
                 const std::vector<Field>& potentials) {
  if (a.size() != rho.species()) throw std::invalid_argument("energy: matrix size != species count");
  if (potentials.size() != rho.species()) throw std::invalid_argument("energy: potential count mismatch");
}

}  // namespace

double interaction_energy(const MultiDensity& rho, const InteractionMatrix& a,
                          const std::vector<Field>& potentials) {
  check_sizes(rho, a, potentials);
  const std::size_t n = rho.species();
  double w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a(i, j) == 0.0) continue;
      const Field& r = rho.field(i);
      const Field& u = potentials[j];
      double s = 0.0;
      for (std::size_t k = 0; k < r.size(); ++k) s += u[k] * r[k];
      w += a(i, j) * s;
    }
  }
  return -0.5 * w * rho.grid().cell_area();
}

double interaction_energy(const MultiDensity& rho, const InteractionMatrix& a) {
  if (a.is_zero()) return 0.0;
  LogKernelConvolver conv(rho.grid());
  return interaction_energy(rho, a, species_potentials(rho, conv));
}

EnergyReport free_energy(const MultiDensity& rho, const InteractionMatrix& a,
                         const std::vector<Field>& potentials) {
  EnergyReport r;
  r.species_entropy.resize(rho.species());
  for (std::size_t i = 0; i < rho.species(); ++i) {
    r.species_entropy[i] = field_entropy(rho.grid(), rho.field(i));
    r.entropy += r.species_entropy[i];
  }
  r.interaction = a.is_zero() ? 0.0 : interaction_energy(rho, a, potentials);
  r.free_energy = r.entropy + r.interaction;
  return r;
}

EnergyReport free_energy(const MultiDensity& rho, const InteractionMatrix& a) {
  if (a.size() != rho.species()) throw std::invalid_argument("energy: matrix size != species count");
  if (a.is_zero()) return free_energy(rho, a, std::vector<Field>(rho.species()));
  LogKernelConvolver conv(rho.grid());
  return free_energy(rho, a, species_potentials(rho, conv));
}

std::vector<double> dissipation_per_species(const MultiDensity& rho, const InteractionMatrix& a,
                                            const std::vector<Field>& potentials) {
  if (a.size() != rho.species()) throw std::invalid_argument("energy: matrix size != species count");
  const Grid& grid = rho.grid();
  const std::size_t n = rho.species(), m = grid.size();
  std::vector<Field> ux(n), uy(n);
  if (!a.is_zero()) {
    if (potentials.size() != n) throw std::invalid_argument("energy: potential count mismatch");
    for (std::size_t j = 0; j < n; ++j) gradient(grid, potentials[j], ux[j], uy[j]);
  }
  std::vector<double> out(n, 0.0);
  Field gx, gy;
  for (std::size_t i = 0; i < n; ++i) {
    const Field& r = rho.field(i);
    gradient(grid, r, gx, gy);
    const double floor = kQuotientFloor * *std::max_element(r.begin(), r.end());
    Field vx(m, 0.0), vy(m, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double aij = a(i, j);
      if (aij == 0.0) continue;
      for (std::size_t k = 0; k < m; ++k) {
        vx[k] += aij * ux[j][k];
        vy[k] += aij * uy[j][k];
      }
    }
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      double inv = 1.0 / std::max(r[k], floor);
      double wx = gx[k] * inv - vx[k], wy = gy[k] * inv - vy[k];
      s += (wx * wx + wy * wy) * r[k];
    }
    out[i] = s * grid.cell_area();
  }
  return out;
}

double dissipation(const MultiDensity& rho, const InteractionMatrix& a,
                   const std::vector<Field>& potentials) {
  double s = 0.0;
  for (double d : dissipation_per_species(rho, a, potentials)) s += d;
  return s;
}

double dissipation(const MultiDensity& rho, const InteractionMatrix& a) {
  if (a.size() != rho.species()) throw std::invalid_argument("energy: matrix size != species count");
  if (a.is_zero()) return dissipation(rho, a, {});
  LogKernelConvolver conv(rho.grid());
  return dissipation(rho, a, species_potentials(rho, conv));
}

double fisher_information(const Grid& grid, std::span<const double> f) {
  Field gx, gy;
  gradient(grid, f, gx, gy);
  double mx = 0.0;
  for (double v : f) mx = std::max(mx, v);
  const double floor = kQuotientFloor * mx;
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f[k] <= 0.0) continue;
    double inv = 1.0 / std::max(f[k], floor);
    s += (gx[k] * gx[k] + gy[k] * gy[k]) * inv * inv * f[k];
  }
  return s * grid.cell_area();
}

}  // namespace pks::energy
