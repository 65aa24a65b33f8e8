#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "pks/io/config.hpp"
#include "pks/jko/scheme.hpp"

namespace pks::io {

inline constexpr const char* kVersion = "0.1.0";

// Files of a run directory.
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kSeriesFile = "series.csv";
inline constexpr const char* kDeGiorgiFile = "degiorgi.csv";
inline constexpr const char* kSnapshotDir = "snapshots";

std::string snapshot_name(int step);  // "step_000010.bin"

// Library and build versions recorded in the manifest.
nlohmann::json build_info();

// Writes series, De Giorgi samples (if any), snapshots and the manifest.
void write_run(const std::filesystem::path& dir, const RunConfig& cfg, const jko::Trajectory& tr);

struct LoadedRun {
  RunConfig config;
  jko::Trajectory trajectory;
  nlohmann::json manifest;
};
// Throws CorruptInput on missing or inconsistent files.
LoadedRun load_run(const std::filesystem::path& dir);

}  // namespace pks::io
