#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pks/jko/scheme.hpp"

namespace pks::io {

// Column names of the series CSV for n species, in file order.
std::vector<std::string> series_columns(std::size_t n_species);

// One row per record (row 0 is the initial state), values at %.17g.
void write_series(const std::filesystem::path& path, const std::vector<jko::StepRecord>& records,
                  std::size_t n_species);
// Throws CorruptInput on a bad header or a malformed or short row.
std::vector<jko::StepRecord> read_series(const std::filesystem::path& path, std::size_t n_species);

// step,fraction,dissipation,distance_sq_base,gap_sq (gap_sq empty when absent)
void write_degiorgi(const std::filesystem::path& path, const std::vector<jko::DeGiorgiSample>& s);
std::vector<jko::DeGiorgiSample> read_degiorgi(const std::filesystem::path& path);

// Header line and one formatted row, without the newline.
std::string series_row(const jko::StepRecord& r);
std::string series_header(std::size_t n_species);

}  // namespace pks::io
