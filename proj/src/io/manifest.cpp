#include "pks/io/manifest.hpp"

#include <fftw3.h>

#include <Eigen/Core>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pks/io/series.hpp"
#include "pks/io/snapshot.hpp"
#include "pks/simd/kernels.hpp"
#include "pks/simd/parallel.hpp"

namespace pks::io {

using nlohmann::json;

std::string snapshot_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%06d.bin", step);
  return buf;
}

json build_info() {
  json j;
  j["pks"] = kVersion;
  j["compiler"] = __VERSION__;
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  j["fftw"] = std::string(fftw_version);
  j["json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
              std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  j["simd"] = simd::active_kernels().name;
  j["threads"] = simd::thread_count();
  return j;
}

void write_run(const std::filesystem::path& dir, const RunConfig& cfg, const jko::Trajectory& tr) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir / kSnapshotDir, ec);
  if (ec) throw std::runtime_error(dir.string() + ": cannot create output directory: " + ec.message());
  const std::size_t n = tr.beta.size();
  write_series(dir / kSeriesFile, tr.records, n);
  if (!tr.degiorgi.empty()) write_degiorgi(dir / kDeGiorgiFile, tr.degiorgi);
  json snaps = json::array();
  for (const auto& s : tr.snapshots) {
    const std::string name = snapshot_name(s.step);
    write_snapshot(dir / kSnapshotDir / name, s.density, s.step, s.t);
    if (cfg.output.snapshot_csv) {
      fs::path csv = dir / kSnapshotDir / name;
      csv.replace_extension(".csv");
      write_snapshot_csv(csv, s.density, s.step, s.t);
    }
    snaps.push_back({{"step", s.step}, {"t", s.t}, {"file", std::string(kSnapshotDir) + "/" + name}});
  }
  json m;
  m["format"] = "pks-manifest";
  m["format_version"] = 1;
  m["config"] = to_json(cfg);
  m["build"] = build_info();
  m["status"] = jko::to_string(tr.status);
  m["halt_reason"] = tr.halt_reason;
  m["records"] = tr.records.size();
  m["steps_completed"] = tr.records.empty() ? 0 : tr.records.back().step;
  m["snapshots"] = snaps;
  m["degiorgi_samples"] = tr.degiorgi.size();
  m["eps"] = tr.params.eps_for(tr.grid);
  std::ofstream out(dir / kManifestFile, std::ios::trunc);
  if (!out) throw std::runtime_error((dir / kManifestFile).string() + ": cannot open for writing");
  out << m.dump(2) << '\n';
  if (!out) throw std::runtime_error((dir / kManifestFile).string() + ": write failed");
}

LoadedRun load_run(const std::filesystem::path& dir) {
  const auto mpath = dir / kManifestFile;
  std::ifstream in(mpath);
  if (!in) throw CorruptInput(mpath.string() + ": cannot open manifest");
  std::stringstream ss;
  ss << in.rdbuf();
  LoadedRun run;
  try {
    run.manifest = json::parse(ss.str());
    if (run.manifest.value("format", "") != "pks-manifest") throw CorruptInput(mpath.string() + ": not a run manifest");
    run.config = parse_config(ss.str(), dir);
  } catch (const json::exception& e) {
    throw CorruptInput(mpath.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw CorruptInput(mpath.string() + ": " + e.what());
  }
  const RunConfig& cfg = run.config;
  jko::Trajectory& tr = run.trajectory;
  tr.grid = cfg.grid();
  tr.beta = cfg.masses();
  tr.a = cfg.a;
  tr.params = cfg.jko;
  try {
    const std::string status = run.manifest.at("status").get<std::string>();
    if (status == "completed") tr.status = jko::RunStatus::Completed;
    else if (status == "halted_boundary_mass") tr.status = jko::RunStatus::HaltedBoundaryMass;
    else if (status == "halted_blowup") tr.status = jko::RunStatus::HaltedBlowup;
    else throw CorruptInput(mpath.string() + ": unknown status \"" + status + "\"");
    tr.halt_reason = run.manifest.value("halt_reason", "");

    tr.records = read_series(dir / kSeriesFile, tr.beta.size());
    const std::size_t expected = run.manifest.at("records").get<std::size_t>();
    if (tr.records.size() != expected)
      throw CorruptInput((dir / kSeriesFile).string() + ": " + std::to_string(tr.records.size()) +
                         " rows, manifest expects " + std::to_string(expected) + " (truncated?)");
    for (std::size_t k = 0; k < tr.records.size(); ++k)
      if (tr.records[k].step != static_cast<int>(k))
        throw CorruptInput((dir / kSeriesFile).string() + ": step column out of sequence at row " +
                           std::to_string(k + 1));

    const std::size_t dg = run.manifest.value("degiorgi_samples", std::size_t{0});
    if (dg > 0) {
      tr.degiorgi = read_degiorgi(dir / kDeGiorgiFile);
      if (tr.degiorgi.size() != dg)
        throw CorruptInput((dir / kDeGiorgiFile).string() + ": sample count differs from manifest");
    }
    for (const json& s : run.manifest.at("snapshots")) {
      SnapshotFile f = read_snapshot(dir / s.at("file").get<std::string>());
      if (f.grid.cells() != tr.grid.cells() || f.beta != tr.beta)
        throw CorruptInput(s.at("file").get<std::string>() + ": snapshot does not match the manifest");
      tr.snapshots.push_back({f.step, f.t, MultiDensity(tr.grid, std::move(f.fields), f.beta)});
    }
  } catch (const json::exception& e) {
    throw CorruptInput(mpath.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw CorruptInput(dir.string() + ": " + e.what());
  }
  return run;
}

}  // namespace pks::io
