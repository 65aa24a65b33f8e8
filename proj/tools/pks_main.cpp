// pks: run, inspect and verify JKO simulations of the multi-species
// Patlak-Keller-Segel system.

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pks/cli/commands.hpp"
#include "pks/io/config.hpp"

namespace {

int run_criticality(const std::string& config, const std::vector<std::string>& beta_text,
                    const std::vector<double>& a_flat) {
  using namespace pks;
  if (!config.empty()) return cli::cmd_criticality(config, std::cout, std::cerr);
  if (beta_text.empty()) {
    std::cerr << "error: criticality needs --config or --beta\n";
    return cli::kExitBadInput;
  }
  try {
    std::vector<double> beta;
    for (std::size_t i = 0; i < beta_text.size(); ++i)
      beta.push_back(io::parse_mass(nlohmann::json(beta_text[i]), "--beta[" + std::to_string(i) + "]"));
    const std::size_t n = beta.size();
    InteractionMatrix a = InteractionMatrix::zero(n);
    if (a_flat.empty()) {
      std::vector<double> id(n * n, 0.0);
      for (std::size_t i = 0; i < n; ++i) id[i * n + i] = 1.0;
      a = InteractionMatrix(n, id);
    } else if (a_flat.size() == n * n) {
      a = InteractionMatrix(n, a_flat);
    } else {
      std::cerr << "error: --a needs " << n * n << " entries (row-major), got " << a_flat.size() << '\n';
      return pks::cli::kExitBadInput;
    }
    return cli::cmd_criticality(beta, a, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitBadInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-species Patlak-Keller-Segel JKO solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pks 0.1.0");

  std::string config;
  pks::cli::RunOverrides ov;
  std::string out_dir;
  std::uint64_t seed = 0;
  int snapshot_every = 0;
  auto* run = app.add_subcommand("run", "Run the JKO scheme from a config or manifest");
  run->add_option("--config", config, "JSON config or run manifest")->required()->check(CLI::ExistingFile);
  auto* out_opt = run->add_option("--out", out_dir, "Output directory (overrides output.directory)");
  auto* seed_opt = run->add_option("--seed", seed, "Seed for random initial data");
  run->add_flag("--allow-supercritical", ov.allow_supercritical, "Run even if the masses are not subcritical");
  auto* snap_opt = run->add_option("--snapshot-every", snapshot_every, "Snapshot interval in steps (0: first and last)");
  run->add_flag("--quiet", ov.quiet, "No per-step progress");

  std::string crit_config;
  std::vector<std::string> beta_text;
  std::vector<double> a_flat;
  auto* crit = app.add_subcommand("criticality", "Classify a mass vector");
  crit->add_option("--config", crit_config, "JSON config")->check(CLI::ExistingFile);
  crit->add_option("--beta", beta_text, "Masses, e.g. 4*pi 4*pi");
  crit->add_option("--a", a_flat, "Interaction matrix, row-major (default: identity)");

  std::string run_dir;
  auto* check = app.add_subcommand("check", "Verify a completed run directory");
  check->add_option("run_dir", run_dir, "Run directory")->required();

  pks::cli::OracleOptions oo;
  auto* oracle = app.add_subcommand("oracle-compare", "Compare debiased Sinkhorn with the exact LP");
  oracle->add_option("--size", oo.size, "Cells per side (4..32)");
  oracle->add_option("--trials", oo.trials, "Random pairs");
  oracle->add_option("--seed", oo.seed, "RNG seed");
  oracle->add_option("--eps-factor", oo.eps_factor, "eps as a multiple of h^2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : pks::cli::kExitBadInput;
  }

  if (*run) {
    if (*out_opt) ov.out = out_dir;
    if (*seed_opt) ov.seed = seed;
    if (*snap_opt) ov.snapshot_every = snapshot_every;
    return pks::cli::cmd_run(config, ov, std::cout, std::cerr);
  }
  if (*crit) return run_criticality(crit_config, beta_text, a_flat);
  if (*check) return pks::cli::cmd_check(run_dir, std::cout, std::cerr);
  if (*oracle) return pks::cli::cmd_oracle_compare(oo, std::cout, std::cerr);
  return pks::cli::kExitBadInput;
}
