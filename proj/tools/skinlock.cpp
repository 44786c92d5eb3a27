// Command-line front end: JSON config plus flag overrides (flags win).
#include "skinlock/commands.hpp"
#include "skinlock/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

namespace {

template <typename T>
void apply(const CLI::Option* flag, const T& value, T& target) {
  if (flag->count() > 0) target = value;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace skinlock;
  CLI::App app{"Steady-state locking diagnostics for open free-fermion chains"};
  app.set_version_flag("--version", kVersion);

  std::string command;
  std::string config_path;
  std::string out, solver, model, pump, input;
  int threads = 1, n_sites = 0, n_cells = 0, site = 0, g_points = 0;
  double t_right = 0, t_left = 0, kappa = 0, t1 = 0, t2 = 0, g = 0, strength = 0, g_min = 0, g_max = 0,
         t_final = 0, dt = 0;
  std::map<std::string, CLI::Option*> given;
  std::vector<int> sites;
  std::vector<double> g_values;

  app.add_option("command", command, "Command to run")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  given["out"] = app.add_option("--out", out, "Output directory");
  given["threads"] = app.add_option("--threads", threads, "Worker threads for scans")->check(CLI::PositiveNumber);
  given["solver"] = app.add_option("--solver", solver, "Steady-state solver")
      ->check(CLI::IsMember({"direct", "direct-vectorized", "spectral"}));
  given["model"] = app.add_option("--model", model, "Lattice model")->check(CLI::IsMember({"hn", "ssh", "custom-file"}));
  given["input"] = app.add_option("--input", input, "JSON file with matrices X and Y");
  given["n"] = app.add_option("--n", n_sites, "HN chain length");
  given["t-right"] = app.add_option("--t-right", t_right, "HN rightward hopping");
  given["t-left"] = app.add_option("--t-left", t_left, "HN leftward hopping");
  given["kappa"] = app.add_option("--kappa", kappa, "Uniform onsite decay (applies to the selected model)");
  given["cells"] = app.add_option("--cells", n_cells, "SSH unit cells");
  given["t1"] = app.add_option("--t1", t1, "SSH intracell hopping");
  given["t2"] = app.add_option("--t2", t2, "SSH intercell hopping");
  given["g"] = app.add_option("--g", g, "SSH nonreciprocity");
  given["pump"] = app.add_option("--pump", pump, "Pump layout")->check(CLI::IsMember({"site", "uniform", "diagonal"}));
  given["site"] = app.add_option("--site", site, "1-based pumped site");
  given["strength"] = app.add_option("--strength", strength, "Pump rate");
  app.add_option("--sites", sites, "Source-scan sites");
  given["g-min"] = app.add_option("--g-min", g_min, "Crossover grid start");
  given["g-max"] = app.add_option("--g-max", g_max, "Crossover grid end");
  given["g-points"] = app.add_option("--g-points", g_points, "Crossover grid size");
  app.add_option("--g-values", g_values, "ssh-profiles points");
  given["t-final"] = app.add_option("--t-final", t_final, "oracle-check trajectory length");
  given["dt"] = app.add_option("--dt", dt, "oracle-check step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitNumeric;
  }

  RunConfig config;
  try {
    if (command.rfind("ssh", 0) == 0) config.model = ModelKind::ssh;
    if (!config_path.empty()) config = config_from_json(read_json_file(config_path), config);
    if (given["model"]->count()) config = config_from_json(json{{"model", model}}, config);
    if (given["solver"]->count()) config = config_from_json(json{{"solver", solver}}, config);
    if (given["pump"]->count()) config = config_from_json(json{{"pump", {{"kind", pump}}}}, config);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitNumeric;
  }
  apply(given["out"], out, config.out_dir);
  apply(given["input"], input, config.input);
  apply(given["threads"], threads, config.threads);
  apply(given["n"], n_sites, config.hn.n_sites);
  apply(given["t-right"], t_right, config.hn.t_right);
  apply(given["t-left"], t_left, config.hn.t_left);
  apply(given["kappa"], kappa, config.model == ModelKind::ssh ? config.ssh.kappa : config.hn.kappa);
  apply(given["cells"], n_cells, config.ssh.n_cells);
  apply(given["t1"], t1, config.ssh.t1);
  apply(given["t2"], t2, config.ssh.t2);
  apply(given["g"], g, config.ssh.g);
  if (given["site"]->count()) config.pump_site = site;
  if (given["strength"]->count()) config.pump_strength = strength;
  if (!sites.empty()) config.scan_sites = sites;
  apply(given["g-min"], g_min, config.g_min);
  apply(given["g-max"], g_max, config.g_max);
  apply(given["g-points"], g_points, config.g_points);
  if (!g_values.empty()) config.g_values = g_values;
  apply(given["t-final"], t_final, config.t_final);
  apply(given["dt"], dt, config.dt);

  return run_command(command, config, std::cout, std::cerr);
}
