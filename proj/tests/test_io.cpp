#include <cmath>
#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "pks/cli/commands.hpp"
#include "pks/core/moments.hpp"
#include "pks/energy/random_fields.hpp"
#include "pks/io/config.hpp"
#include "pks/io/manifest.hpp"
#include "pks/io/series.hpp"
#include "pks/io/snapshot.hpp"

using namespace pks;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("pks_test_io_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

const char* kMinimal = R"({
  "grid": {"L": 4, "N": 32},
  "species": [{"mass": 1.0, "init": {"type": "gaussian", "center": [0, 0], "sigma": 0.6}}],
  "jko": {"tau": 1e-3, "n_steps": 10},
  "output": {"snapshot_every": 1},
  "seed": 7
})";

std::string config_error(const std::string& text) {
  try {
    io::parse_config(text);
  } catch (const io::ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("mass expressions") {
  const double pi = std::numbers::pi;
  CHECK(io::parse_mass(nlohmann::json("4*pi"), "/m") == doctest::Approx(4 * pi));
  CHECK(io::parse_mass(nlohmann::json("4pi"), "/m") == doctest::Approx(4 * pi));
  CHECK(io::parse_mass(nlohmann::json("pi"), "/m") == doctest::Approx(pi));
  CHECK(io::parse_mass(nlohmann::json("8*pi/3"), "/m") == doctest::Approx(8 * pi / 3));
  CHECK(io::parse_mass(nlohmann::json(2.5), "/m") == 2.5);
  CHECK(io::parse_mass(nlohmann::json("12.5"), "/m") == 12.5);
  CHECK_THROWS_AS(io::parse_mass(nlohmann::json("4*tau"), "/m"), io::ConfigError);
  CHECK_THROWS_AS(io::parse_mass(nlohmann::json(-1.0), "/m"), io::ConfigError);
}

TEST_CASE("config parsing and defaults") {
  io::RunConfig c = io::parse_config(kMinimal);
  CHECK(c.cells == 32);
  CHECK(c.species.size() == 1);
  CHECK(c.a.is_zero());
  CHECK(c.n_steps == 10);
  CHECK(c.jko.eps == 0.0);
  CHECK(c.seed == 7);
  io::RunConfig again = io::parse_config(io::to_json(c).dump());
  CHECK(io::to_json(again) == io::to_json(c));
}

TEST_CASE("config errors name the offending field") {
  CHECK(config_error("{ \"grid\": ").rfind("line 1, column", 0) == 0);
  CHECK(config_error("{\n  \"grid\": {\"L\": 4,, \"N\": 8}\n}").rfind("line 2, column", 0) == 0);
  std::string bad = kMinimal;
  bad.replace(bad.find("\"N\": 32"), 7, "\"N\": 2");
  CHECK(config_error(bad).rfind("/grid/N:", 0) == 0);
  bad = kMinimal;
  bad.replace(bad.find("\"sigma\": 0.6"), 12, "\"sigma\": -1");
  CHECK(config_error(bad).rfind("/species/0/init/sigma:", 0) == 0);
  bad = kMinimal;
  bad.replace(bad.find("\"seed\": 7"), 9, "\"seed\": 7, \"colour\": 1");
  CHECK(config_error(bad).rfind("/colour:", 0) == 0);
  bad = kMinimal;
  bad.replace(bad.find("\"n_steps\": 10"), 13, "\"max_inner\": 4");
  CHECK(config_error(bad).rfind("/jko/n_steps:", 0) == 0);
  bad = kMinimal;
  bad.replace(bad.find("\"jko\""), 5, "\"interaction\": [[1, 2]], \"jko\"");
  CHECK(config_error(bad).rfind("/interaction", 0) == 0);
}

TEST_CASE("eps expressions") {
  std::string text = kMinimal;
  text.replace(text.find("\"tau\": 1e-3"), 11, "\"tau\": 1e-3, \"eps\": \"h^2/4\"");
  io::RunConfig c = io::parse_config(text);
  CHECK(c.jko.eps == doctest::Approx(c.grid().cell_area() / 4));
}

TEST_CASE("snapshot round trip and corruption") {
  fs::path dir = scratch("snap");
  fs::create_directories(dir);
  Grid g(3.0, 16);
  std::mt19937_64 rng(9);
  MultiDensity rho(g, {energy::random_smooth_density(g, rng, 2.0), energy::random_rough_density(g, rng, 5.0)},
                   {2.0, 5.0});
  fs::path p = dir / "s.bin";
  io::write_snapshot(p, rho, 12, 0.012);
  io::SnapshotFile s = io::read_snapshot(p);
  CHECK(s.step == 12);
  CHECK(s.t == 0.012);
  CHECK(s.grid == g);
  CHECK(s.density() == rho);
  CHECK(read_file(p).size() == 8 + 16 + 16 + 16 + 2 * 16 * 16 * 8);

  std::string bytes = read_file(p);
  write_file(dir / "trunc.bin", bytes.substr(0, bytes.size() - 8));
  CHECK_THROWS_AS(io::read_snapshot(dir / "trunc.bin"), io::CorruptInput);
  write_file(dir / "long.bin", bytes + "x");
  CHECK_THROWS_AS(io::read_snapshot(dir / "long.bin"), io::CorruptInput);
  std::string magic = bytes;
  magic[0] = 'Q';
  write_file(dir / "magic.bin", magic);
  CHECK_THROWS_AS(io::read_snapshot(dir / "magic.bin"), io::CorruptInput);
  io::write_snapshot_csv(dir / "s.csv", rho, 12, 0.012);
  CHECK(fs::file_size(dir / "s.csv") > 0);
  fs::remove_all(dir);
}

TEST_CASE("series round trip and truncation") {
  fs::path dir = scratch("series");
  fs::create_directories(dir);
  std::vector<jko::StepRecord> recs;
  for (int k = 0; k < 4; ++k) {
    jko::StepRecord r;
    r.step = k;
    r.t = k * 1e-3;
    r.mass = {1.0 / 3.0, 2.0};
    r.second_moment = std::sqrt(2.0) * k;
    r.entropy = -0.1 * k;
    r.free_energy = 1e-17 * k;
    r.dissipation = 3.0;
    r.species_dissipation = {1.0, 2.0};
    r.species_distance_sq = {0.1, 0.2};
    r.step_distance_sq = 0.30000000000000004;
    r.production_ratio = k == 0 ? std::nan("") : 0.99;
    r.outer_iters = k;
    r.sinkhorn_iters = 123456789012L;
    r.converged = k != 2;
    recs.push_back(r);
  }
  fs::path p = dir / "series.csv";
  io::write_series(p, recs, 2);
  auto back = io::read_series(p, 2);
  REQUIRE(back.size() == recs.size());
  for (std::size_t k = 0; k < recs.size(); ++k) CHECK(io::series_row(back[k]) == io::series_row(recs[k]));
  CHECK(std::isnan(back[0].production_ratio));
  CHECK(back[2].converged == false);
  CHECK(io::series_columns(2).front() == "step");

  std::string text = read_file(p);
  write_file(dir / "cut.csv", text.substr(0, text.size() - 20));
  CHECK_THROWS_AS(io::read_series(dir / "cut.csv", 2), io::CorruptInput);
  CHECK_THROWS_AS(io::read_series(dir / "missing.csv", 2), io::CorruptInput);

  std::vector<jko::DeGiorgiSample> dg{{1, 0.5, 2.0, 0.1, std::nullopt}, {2, 0.25, 3.0, 0.2, 1e-4}};
  io::write_degiorgi(dir / "dg.csv", dg);
  auto dg2 = io::read_degiorgi(dir / "dg.csv");
  REQUIRE(dg2.size() == 2);
  CHECK(!dg2[0].gap_sq);
  CHECK(dg2[1].gap_sq.value() == 1e-4);
  CHECK(dg2[1].fraction == 0.25);
  fs::remove_all(dir);
}

TEST_CASE("run, reload, check and reproduce") {
  fs::path dir = scratch("run");
  fs::create_directories(dir);
  fs::path cfg = dir / "config.json";
  write_file(cfg, kMinimal);
  cli::RunOverrides ov;
  ov.out = dir / "out";
  ov.quiet = true;
  std::ostringstream out, err;
  REQUIRE(cli::cmd_run(cfg, ov, out, err) == cli::kExitOk);
  CHECK(fs::exists(dir / "out" / "series.csv"));
  io::LoadedRun run = io::load_run(dir / "out");
  CHECK(run.trajectory.records.size() == 11);
  CHECK(run.trajectory.snapshots.size() == 11);
  int bins = 0;
  for (auto& e : fs::directory_iterator(dir / "out" / "snapshots")) bins += e.path().extension() == ".bin";
  CHECK(bins == 11);

  std::ostringstream cout_, cerr_;
  CHECK(cli::cmd_check(dir / "out", cout_, cerr_) == cli::kExitOk);
  CHECK(cout_.str().find("FAIL") == std::string::npos);

  // The manifest alone reproduces the series byte for byte.
  ov.out = dir / "again";
  REQUIRE(cli::cmd_run(dir / "out" / "manifest.json", ov, out, err) == cli::kExitOk);
  CHECK(read_file(dir / "again" / "series.csv") == read_file(dir / "out" / "series.csv"));

  // A truncated series is reported as corrupt input.
  std::string series = read_file(dir / "out" / "series.csv");
  write_file(dir / "out" / "series.csv", series.substr(0, series.rfind('\n', series.size() - 2) + 1));
  std::ostringstream o2, e2;
  CHECK(cli::cmd_check(dir / "out", o2, e2) == cli::kExitBadInput);
  CHECK(e2.str().find("corrupt") != std::string::npos);
  CHECK_THROWS_AS(io::load_run(dir / "out"), io::CorruptInput);
  fs::remove_all(dir);
}

TEST_CASE("run refuses supercritical masses") {
  fs::path dir = scratch("refuse");
  fs::create_directories(dir);
  std::string text = kMinimal;
  text.replace(text.find("\"mass\": 1.0"), 11, "\"mass\": \"12*pi\"");
  text.replace(text.find("\"jko\""), 5, "\"interaction\": [[1]], \"jko\"");
  write_file(dir / "c.json", text);
  cli::RunOverrides ov;
  ov.out = dir / "out";
  ov.quiet = true;
  std::ostringstream out, err;
  CHECK(cli::cmd_run(dir / "c.json", ov, out, err) == cli::kExitRefused);
  CHECK(err.str().find("Supercritical") != std::string::npos);
  CHECK(cli::cmd_run(dir / "nope.json", ov, out, err) == cli::kExitBadInput);
  fs::remove_all(dir);
}

TEST_CASE("criticality report") {
  std::ostringstream out;
  const double pi = std::numbers::pi;
  cli::cmd_criticality({8 * pi}, InteractionMatrix::from_rows({{1}}), out);
  CHECK(out.str().find("classification: Critical") != std::string::npos);
  CHECK(out.str().find("predicted M2 slope: 0\n") != std::string::npos);
  out.str("");
  cli::cmd_criticality({4 * pi}, InteractionMatrix::from_rows({{1}}), out);
  CHECK(out.str().find("classification: Subcritical") != std::string::npos);
  out.str("");
  cli::cmd_criticality({10 * pi, 2 * pi}, InteractionMatrix::from_rows({{1, 0}, {0, 1}}), out);
  CHECK(out.str().find("witness: {1}\n") != std::string::npos);
}

TEST_CASE("oracle compare is reproducible") {
  cli::OracleOptions o;
  o.trials = 5;
  std::ostringstream a, b, err;
  CHECK(cli::cmd_oracle_compare(o, a, err) == cli::kExitOk);
  CHECK(cli::cmd_oracle_compare(o, b, err) == cli::kExitOk);
  CHECK(a.str() == b.str());
  o.size = 33;
  CHECK(cli::cmd_oracle_compare(o, a, err) == cli::kExitBadInput);
}
