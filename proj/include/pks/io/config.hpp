#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pks/core/interaction.hpp"
#include "pks/core/multi_density.hpp"
#include "pks/jko/params.hpp"
#include "pks/jko/scheme.hpp"

namespace pks::io {

// Invalid configuration; the message starts with "line L, column C:" for
// syntax errors and with the JSON pointer of the offending field otherwise.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InitSpec {
  enum class Kind { Gaussian, Uniform, File, RandomSmooth };
  Kind kind = Kind::Gaussian;
  std::array<double, 2> center{0.0, 0.0};
  double sigma = 1.0;
  std::filesystem::path path;  // File: snapshot to read (absolute after parsing)
  std::size_t species = 0;     // File: species index inside the snapshot
  // RandomSmooth; when absent, the run seed plus the species index.
  std::optional<std::uint64_t> seed;
};

struct SpeciesConfig {
  double mass = 0.0;
  std::string mass_text;  // as written, e.g. "4*pi"
  InitSpec init;
};

struct OutputConfig {
  std::filesystem::path directory = "run";
  int snapshot_every = 1;
  std::string series_format = "csv";
  bool snapshot_csv = false;
};

struct RunConfig {
  double half_extent = 0.0;
  int cells = 0;
  std::vector<SpeciesConfig> species;
  InteractionMatrix a = InteractionMatrix::zero(1);
  jko::JkoParams jko;
  int n_steps = 0;
  OutputConfig output;
  jko::MonitorOptions monitor;
  std::vector<double> degiorgi_fractions;
  bool degiorgi_gap = false;
  std::uint64_t seed = 0;

  Grid grid() const { return Grid(half_extent, cells); }
  std::uint64_t init_seed(std::size_t species) const;
  std::vector<double> masses() const;
};

// "12.5", 12.5, "pi", "4*pi", "4pi", "8*pi/3".
double parse_mass(const nlohmann::json& value, const std::string& where);

// Parses and validates. A run manifest is accepted too (its "config" member is
// used). Relative file paths resolve against base_dir.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

// Fully resolved configuration with every default written out.
nlohmann::json to_json(const RunConfig& cfg);

MultiDensity initial_density(const RunConfig& cfg);

}  // namespace pks::io
