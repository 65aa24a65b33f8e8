#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "pks/core/grid.hpp"
#include "pks/core/multi_density.hpp"

namespace pks::io {

// Missing, truncated or malformed run files.
class CorruptInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr char kSnapshotMagic[8] = {'P', 'K', 'S', 'S', 'N', 'A', 'P', '\0'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

// Little-endian layout:
//   char[8] magic, u32 version, u32 N, u32 n, u32 step, f64 L, f64 t,
//   f64 beta[n], then n blocks of N*N f64 values (row-major, y index fastest).
struct SnapshotFile {
  Grid grid{1.0, 4};
  int step = 0;
  double t = 0.0;
  std::vector<double> beta;
  std::vector<Field> fields;

  MultiDensity density() const { return MultiDensity(grid, fields, beta); }
};

void write_snapshot(const std::filesystem::path& path, const MultiDensity& rho, int step, double t);
SnapshotFile read_snapshot(const std::filesystem::path& path);

// Plain-text export: a comment header, then "x,y,rho_1,...,rho_n" per cell.
void write_snapshot_csv(const std::filesystem::path& path, const MultiDensity& rho, int step,
                        double t);

}  // namespace pks::io
