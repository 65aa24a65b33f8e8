#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "pks/core/interaction.hpp"

namespace pks::cli {

// Exit codes shared by the subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitBadInput = 2;  // invalid config, arguments or corrupt run files
inline constexpr int kExitRefused = 3;   // mass not subcritical without the override
inline constexpr int kExitIoError = 4;
inline constexpr int kExitInternal = 5;

struct RunOverrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  bool allow_supercritical = false;
  std::optional<int> snapshot_every;
  bool quiet = false;
};

int cmd_run(const std::filesystem::path& config, const RunOverrides& overrides, std::ostream& out,
            std::ostream& err);

// Every nonempty J with Lambda_J, the classification and the predicted slope.
int cmd_criticality(const std::vector<double>& beta, const InteractionMatrix& a, std::ostream& out);
int cmd_criticality(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

int cmd_check(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);

struct OracleOptions {
  int size = 8;
  int trials = 100;
  std::uint64_t seed = 1;
  double eps_factor = 0.25;  // eps = eps_factor * h^2
};
int cmd_oracle_compare(const OracleOptions& options, std::ostream& out, std::ostream& err);

}  // namespace pks::cli
