#pragma once

#include "skinlock/io.hpp"
#include "skinlock/lattice.hpp"
#include "skinlock/orbitals.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace skinlock {

enum class ModelKind { hn, ssh, custom_file };

enum class PumpKind { site, uniform, diagonal };

/// Everything a command needs. Unset optionals resolve to per-model
/// defaults: HN pumps site 15 with 0.03, SSH pumps 1A with 1e-8.
struct RunConfig {
  ModelKind model = ModelKind::hn;
  HatanoNelsonParams hn;
  SshParams ssh;
  PumpKind pump = PumpKind::site;
  std::optional<int> pump_site;
  std::optional<double> pump_strength;
  std::vector<double> pump_rates;  ///< PumpKind::diagonal
  SolverChoice solver = SolverChoice::direct;
  int threads = 1;
  std::string out_dir = ".";
  std::string input;  ///< custom (X, Y) file for validate / inverse-design
  std::vector<int> scan_sites;  ///< empty: every site
  double g_min = -0.55;
  double g_max = 0.60;
  int g_points = 24;
  std::vector<double> g_values = {-0.25, 0.20};  ///< ssh-profiles points
  double t_final = 10.0;
  double dt = 0.005;
  std::uint64_t seed = 0;  ///< reserved

  int dim() const;
  int resolved_site() const;
  double resolved_strength() const;
  /// Diagonal of Y.
  std::vector<double> pump_diagonal() const;
};

std::string to_string(ModelKind model);
std::string to_string(SolverChoice solver);

json config_to_json(const RunConfig& config);
/// Fields absent from `j` keep their value in `base`.
RunConfig config_from_json(const json& j, RunConfig base = {});

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumeric = 2, kExitInfeasible = 3 };

const std::vector<std::string>& command_names();

/// Runs one command, writing its files into config.out_dir and a short
/// report to `log`. Errors become exit codes with the message on `err`.
int run_command(const std::string& name, const RunConfig& config, std::ostream& log,
                std::ostream& err);

}  // namespace skinlock
