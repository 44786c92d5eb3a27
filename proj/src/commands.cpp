#include "skinlock/commands.hpp"

#include "skinlock/errors.hpp"
#include "skinlock/inverse_design.hpp"
#include "skinlock/lindblad.hpp"
#include "skinlock/steady_state.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace skinlock {

int RunConfig::dim() const {
  switch (model) {
    case ModelKind::hn: return hn.n_sites;
    case ModelKind::ssh: return 2 * ssh.n_cells;
    case ModelKind::custom_file: break;
  }
  fail(ErrorKind::parameter, "custom-file models take their dimension from the input file");
}

int RunConfig::resolved_site() const {
  if (pump_site) return *pump_site;
  return model == ModelKind::hn ? std::min(15, hn.n_sites) : 1;
}

double RunConfig::resolved_strength() const {
  if (pump_strength) return *pump_strength;
  return model == ModelKind::hn ? 0.03 : 1e-8;
}

std::vector<double> RunConfig::pump_diagonal() const {
  const int n = dim();
  switch (pump) {
    case PumpKind::site: {
      const int site = resolved_site();
      require(site >= 1 && site <= n, ErrorKind::index,
              "pump site " + std::to_string(site) + " outside 1.." + std::to_string(n));
      std::vector<double> rates(static_cast<std::size_t>(n), 0.0);
      rates[static_cast<std::size_t>(site - 1)] = resolved_strength();
      return rates;
    }
    case PumpKind::uniform: return std::vector<double>(static_cast<std::size_t>(n), resolved_strength());
    case PumpKind::diagonal:
      require(static_cast<int>(pump_rates.size()) == n, ErrorKind::parameter,
              "pump_rates has " + std::to_string(pump_rates.size()) + " entries, expected " +
                  std::to_string(n));
      return pump_rates;
  }
  fail(ErrorKind::parameter, "unknown pump kind");
}

std::string to_string(ModelKind model) {
  switch (model) {
    case ModelKind::hn: return "hn";
    case ModelKind::ssh: return "ssh";
    case ModelKind::custom_file: return "custom-file";
  }
  return "unknown";
}

std::string to_string(SolverChoice solver) {
  switch (solver) {
    case SolverChoice::direct: return "direct";
    case SolverChoice::direct_vectorized: return "direct-vectorized";
    case SolverChoice::spectral: return "spectral";
  }
  return "unknown";
}

namespace {

std::string to_string(PumpKind kind) {
  switch (kind) {
    case PumpKind::site: return "site";
    case PumpKind::uniform: return "uniform";
    case PumpKind::diagonal: return "diagonal";
  }
  return "unknown";
}

template <typename T>
void read_field(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

}  // namespace

json config_to_json(const RunConfig& c) {
  json out;
  out["model"] = to_string(c.model);
  out["hn"] = {{"n_sites", c.hn.n_sites}, {"t_right", c.hn.t_right}, {"t_left", c.hn.t_left},
               {"kappa", c.hn.kappa}};
  out["ssh"] = {{"n_cells", c.ssh.n_cells}, {"t1", c.ssh.t1}, {"t2", c.ssh.t2}, {"g", c.ssh.g},
                {"kappa", c.ssh.kappa}};
  json pump = {{"kind", to_string(c.pump)}};
  if (c.model != ModelKind::custom_file) {
    pump["site"] = c.resolved_site();
    pump["strength"] = c.resolved_strength();
  }
  if (c.pump == PumpKind::diagonal) pump["rates"] = c.pump_rates;
  out["pump"] = std::move(pump);
  out["solver"] = to_string(c.solver);
  out["threads"] = c.threads;
  out["out"] = c.out_dir;
  out["input"] = c.input;
  out["scan"] = {{"sites", c.scan_sites}, {"g_min", c.g_min}, {"g_max", c.g_max},
                 {"g_points", c.g_points}, {"g_values", c.g_values}};
  out["oracle"] = {{"t_final", c.t_final}, {"dt", c.dt}};
  out["seed"] = c.seed;
  return out;
}

RunConfig config_from_json(const json& j, RunConfig base) {
  try {
    if (j.contains("model")) {
      const auto model = j.at("model").get<std::string>();
      if (model == "hn") base.model = ModelKind::hn;
      else if (model == "ssh") base.model = ModelKind::ssh;
      else if (model == "custom-file") base.model = ModelKind::custom_file;
      else fail(ErrorKind::parameter, "unknown model '" + model + "'");
    }
    if (j.contains("hn")) {
      const auto& h = j.at("hn");
      read_field(h, "n_sites", base.hn.n_sites);
      read_field(h, "t_right", base.hn.t_right);
      read_field(h, "t_left", base.hn.t_left);
      read_field(h, "kappa", base.hn.kappa);
    }
    if (j.contains("ssh")) {
      const auto& s = j.at("ssh");
      read_field(s, "n_cells", base.ssh.n_cells);
      read_field(s, "t1", base.ssh.t1);
      read_field(s, "t2", base.ssh.t2);
      read_field(s, "g", base.ssh.g);
      read_field(s, "kappa", base.ssh.kappa);
    }
    if (j.contains("pump")) {
      const auto& p = j.at("pump");
      if (p.contains("kind")) {
        const auto kind = p.at("kind").get<std::string>();
        if (kind == "site") base.pump = PumpKind::site;
        else if (kind == "uniform") base.pump = PumpKind::uniform;
        else if (kind == "diagonal") base.pump = PumpKind::diagonal;
        else fail(ErrorKind::parameter, "unknown pump kind '" + kind + "'");
      }
      if (p.contains("site")) base.pump_site = p.at("site").get<int>();
      if (p.contains("strength")) base.pump_strength = p.at("strength").get<double>();
      read_field(p, "rates", base.pump_rates);
    }
    if (j.contains("solver")) {
      const auto solver = j.at("solver").get<std::string>();
      if (solver == "direct") base.solver = SolverChoice::direct;
      else if (solver == "direct-vectorized") base.solver = SolverChoice::direct_vectorized;
      else if (solver == "spectral") base.solver = SolverChoice::spectral;
      else fail(ErrorKind::parameter, "unknown solver '" + solver + "'");
    }
    read_field(j, "threads", base.threads);
    read_field(j, "out", base.out_dir);
    read_field(j, "input", base.input);
    if (j.contains("scan")) {
      const auto& s = j.at("scan");
      read_field(s, "sites", base.scan_sites);
      read_field(s, "g_min", base.g_min);
      read_field(s, "g_max", base.g_max);
      read_field(s, "g_points", base.g_points);
      read_field(s, "g_values", base.g_values);
    }
    if (j.contains("oracle")) {
      read_field(j.at("oracle"), "t_final", base.t_final);
      read_field(j.at("oracle"), "dt", base.dt);
    }
    read_field(j, "seed", base.seed);
    return base;
  } catch (const json::exception& e) {
    fail(ErrorKind::parameter, std::string("bad config: ") + e.what());
  }
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "hn-profiles",  "hn-source-scan",  "hn-occupations", "ssh-profiles",
      "ssh-crossover", "inverse-design", "validate",       "oracle-check"};
  return names;
}

namespace {

struct Context {
  const RunConfig& config;
  std::string command;
  std::ostream& log;

  std::filesystem::path path(const std::string& file) const {
    return std::filesystem::path(config.out_dir) / file;
  }

  std::vector<std::string> comments() const {
    return {std::string("skinlock ") + kVersion + " " + command,
            "config " + config_to_json(config).dump()};
  }

  json summary() const {
    json out;
    out["version"] = kVersion;
    out["command"] = command;
    out["config"] = config_to_json(config);
    return out;
  }

  void write(const std::string& file, const std::string& text) const {
    write_text_file(path(file).string(), text);
    log << "wrote " << path(file).string() << '\n';
  }

  void write_json(const std::string& file, const json& j) const { write(file, j.dump(2) + "\n"); }
};


json beta_json(const CVector& betas) {
  json re = json::array();
  json im = json::array();
  for (Index n = 0; n < betas.size(); ++n) {
    re.push_back(betas(n).real());
    im.push_back(betas(n).imag());
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

json vector_json(const RVector& v) {
  json out = json::array();
  for (Index n = 0; n < v.size(); ++n) out.push_back(v(n));
  return out;
}

RelaxationMatrix model_relaxation(const RunConfig& config) {
  switch (config.model) {
    case ModelKind::hn: return build_hatano_nelson(config.hn);
    case ModelKind::ssh: return build_ssh(config.ssh);
    case ModelKind::custom_file: break;
  }
  fail(ErrorKind::parameter, "this command needs model hn or ssh");
}

struct LoadedProblem {
  CMatrix x;
  CMatrix y;
  std::vector<std::string> labels;
};

LoadedProblem load_problem(const RunConfig& config) {
  if (config.model == ModelKind::custom_file || !config.input.empty()) {
    require(!config.input.empty(), ErrorKind::parameter, "custom-file model needs --input");
    const json j = read_json_file(config.input);
    require(j.contains("X") && j.contains("Y"), ErrorKind::io,
            "input file must hold matrices under \"X\" and \"Y\"");
    LoadedProblem p;
    p.x = matrix_from_json(j.at("X"), &p.labels);
    p.y = matrix_from_json(j.at("Y"));
    require(p.x.rows() == p.y.rows(), ErrorKind::parameter, "X and Y dimensions differ");
    return p;
  }
  const RelaxationMatrix x = model_relaxation(config);
  const auto rates = config.pump_diagonal();
  return {x.entries(), build_diagonal_pump(rates).entries(), x.labels()};
}

struct SteadyPipeline {
  BiorthogonalSpectrum spectrum;
  SteadyCorrelator correlator;
  NaturalOrbitalSet orbitals;
};

SteadyPipeline run_pipeline(const RelaxationMatrix& x, const SourceMatrix& y, SolverChoice solver) {
  SteadyPipeline p{pipeline_spectrum(x), {}, {}};
  require_stable(p.spectrum.betas);
  p.correlator = solve_steady_state(x, y, solver, &p.spectrum);
  p.orbitals = natural_orbitals(p.correlator);
  return p;
}

json pipeline_json(const SteadyPipeline& p) {
  return {{"betas", beta_json(p.spectrum.betas)},
          {"spectrum_source", to_string(p.spectrum.source)},
          {"condition_estimate", p.spectrum.condition_estimate},
          {"gap_ratio", spectral_gap_ratio(p.spectrum)},
          {"nu", vector_json(p.orbitals.occupations)},
          {"nu_norm", vector_json(p.orbitals.normalized_occupations())},
          {"dominant_tie", p.orbitals.dominant_tie},
          {"residual", p.correlator.residual},
          {"residual_tolerance", p.correlator.residual_tolerance},
          {"residual_ok", p.correlator.residual_ok()}};
}

std::vector<ProfileRow> profile_rows(const std::vector<std::string>& labels, const ModeVector& mode,
                                     const SteadyPipeline& p) {
  const RVector dens = normalized_density(p.correlator.entries);
  const CVector phi = p.orbitals.dominant();
  std::vector<ProfileRow> rows;
  for (Index j = 0; j < phi.size(); ++j) {
    rows.push_back({static_cast<int>(j + 1), labels[static_cast<std::size_t>(j)],
                    std::norm(mode.amplitudes(j)), std::norm(phi(j)), dens(j)});
  }
  return rows;
}

std::string csv_text(const std::function<void(std::ostream&)>& body) {
  std::ostringstream out;
  body(out);
  return out.str();
}

int cmd_hn_profiles(const Context& ctx) {
  const RunConfig& config = ctx.config;
  require(config.model == ModelKind::hn, ErrorKind::parameter, "hn-profiles needs model hn");
  const RelaxationMatrix x = build_hatano_nelson(config.hn);
  const SourceMatrix y = build_diagonal_pump(config.pump_diagonal());
  const SteadyPipeline p = run_pipeline(x, y, config.solver);
  const int slow = identify_slow_mode(p.spectrum);
  const ModeVector r_slow = euclidean_right_mode(p.spectrum, slow);
  const double o1 = overlap(r_slow, p.orbitals.dominant());

  const auto rows = profile_rows(x.labels(), r_slow, p);
  ctx.write("profiles.csv", csv_text([&](std::ostream& o) { write_profiles_csv(o, rows, ctx.comments()); }));
  json summary = ctx.summary();
  summary["steady_state"] = pipeline_json(p);
  summary["slow_mode"] = slow;
  summary["O1"] = o1;
  ctx.write_json("summary.json", summary);
  ctx.log << "O1 = " << o1 << "\n";
  return kExitOk;
}

int cmd_hn_source_scan(const Context& ctx) {
  const RunConfig& config = ctx.config;
  require(config.model == ModelKind::hn, ErrorKind::parameter, "hn-source-scan needs model hn");
  std::vector<int> sites = config.scan_sites;
  if (sites.empty()) {
    for (int s = 1; s <= config.hn.n_sites; ++s) sites.push_back(s);
  }
  for (int s : sites) {
    require(s >= 1 && s <= config.hn.n_sites, ErrorKind::index,
            "scan site " + std::to_string(s) + " outside 1.." + std::to_string(config.hn.n_sites));
  }
  ScanOptions options;
  options.solver = config.solver;
  options.threads = config.threads;
  const auto rows = hn_source_scan(config.hn, config.resolved_strength(), sites, options);

  double max_diff = 0.0;
  std::size_t arg_nu = 0, arg_a = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(rows[i].nu_max_norm - rows[i].loading_norm));
    if (rows[i].nu_max_norm > rows[arg_nu].nu_max_norm) arg_nu = i;
    if (rows[i].loading_norm > rows[arg_a].loading_norm) arg_a = i;
  }
  ctx.write("source_scan.csv", csv_text([&](std::ostream& o) { write_source_scan_csv(o, rows, ctx.comments()); }));
  json summary = ctx.summary();
  summary["max_abs_difference"] = max_diff;
  summary["argmax_nu_max"] = rows[arg_nu].site;
  summary["argmax_A1"] = rows[arg_a].site;
  ctx.write_json("summary.json", summary);
  ctx.log << "max |nu_max_norm - A1_norm| = " << max_diff << "\n";
  return kExitOk;
}

int cmd_hn_occupations(const Context& ctx) {
  const RunConfig& config = ctx.config;
  require(config.model == ModelKind::hn, ErrorKind::parameter, "hn-occupations needs model hn");
  const RelaxationMatrix x = build_hatano_nelson(config.hn);
  const SourceMatrix y = build_diagonal_pump(config.pump_diagonal());
  const SteadyPipeline p = run_pipeline(x, y, config.solver);
  const RVector norm = p.orbitals.normalized_occupations();

  std::ostringstream csv;
  for (const auto& line : ctx.comments()) csv << "# " << line << '\n';
  csv << "alpha,nu,nu_norm\n";
  for (Index a = 0; a < norm.size(); ++a) {
    csv << a + 1 << ',' << format_csv(p.orbitals.occupations(a)) << ',' << format_csv(norm(a)) << '\n';
  }
  ctx.write("occupations.csv", csv.str());
  json summary = ctx.summary();
  summary["steady_state"] = pipeline_json(p);
  summary["nu2_norm"] = norm.size() > 1 ? json(norm(1)) : json(nullptr);
  ctx.write_json("summary.json", summary);
  if (norm.size() > 1) ctx.log << "nu2 / nu_max = " << norm(1) << "\n";
  return kExitOk;
}

std::string g_tag(double g) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.4f", g);
  return buf;
}

int cmd_ssh_profiles(const Context& ctx) {
  const RunConfig& config = ctx.config;
  require(config.model == ModelKind::ssh, ErrorKind::parameter, "ssh-profiles needs model ssh");
  require(!config.g_values.empty(), ErrorKind::parameter, "ssh-profiles needs at least one g value");
  const SourceMatrix y = build_diagonal_pump(config.pump_diagonal());
  json points = json::array();
  for (double g : config.g_values) {
    SshParams params = config.ssh;
    params.g = g;
    const RelaxationMatrix x = build_ssh(params);
    const SteadyPipeline p = run_pipeline(x, y, config.solver);
    const int slow = identify_slow_mode(p.spectrum);
    const EdgeCandidate edge = identify_edge_candidate(p.spectrum, params.kappa, {0.1, 2});
    const ModeVector r_slow = euclidean_right_mode(p.spectrum, slow);
    const ModeVector r_edge = euclidean_right_mode(p.spectrum, edge.mode);
    const CVector phi = p.orbitals.dominant();

    const std::string tag = g_tag(g);
    const auto rows = profile_rows(x.labels(), r_slow, p);
    ctx.write("profiles_g" + tag + ".csv",
              csv_text([&](std::ostream& o) { write_profiles_csv(o, rows, ctx.comments()); }));
    std::ostringstream edge_csv;
    for (const auto& line : ctx.comments()) edge_csv << "# " << line << '\n';
    edge_csv << "j,label,R_edge_sq\n";
    for (Index j = 0; j < phi.size(); ++j) {
      edge_csv << j + 1 << ',' << x.labels()[static_cast<std::size_t>(j)] << ','
               << format_csv(std::norm(r_edge.amplitudes(j))) << '\n';
    }
    ctx.write("edge_profile_g" + tag + ".csv", edge_csv.str());

    json point = {{"g", g},
                  {"O_edge", overlap(r_edge, phi)},
                  {"O_slow", overlap(r_slow, phi)},
                  {"edge_mode", edge.mode},
                  {"edge_window_occupancy", edge.window_occupancy},
                  {"edge_fallback", edge.fallback},
                  {"edge_boundary_weight", edge.boundary_weight},
                  {"slow_mode", slow},
                  {"steady_state", pipeline_json(p)}};
    ctx.log << "g = " << g << ": O_edge = " << point["O_edge"].get<double>()
            << ", O_slow = " << point["O_slow"].get<double>() << "\n";
    points.push_back(std::move(point));
  }
  json summary = ctx.summary();
  summary["points"] = std::move(points);
  ctx.write_json("summary.json", summary);
  return kExitOk;
}

int cmd_ssh_crossover(const Context& ctx) {
  const RunConfig& config = ctx.config;
  require(config.model == ModelKind::ssh, ErrorKind::parameter, "ssh-crossover needs model ssh");
  require(config.pump == PumpKind::site, ErrorKind::parameter, "ssh-crossover pumps a single site");
  const int site = config.resolved_site();
  require(site >= 1 && site <= config.dim() && site % 2 == 1, ErrorKind::index,
          "ssh-crossover pump must be an A site inside the chain");
  ScanOptions options;
  options.solver = config.solver;
  options.threads = config.threads;
  const auto grid = uniform_grid(config.g_min, config.g_max, config.g_points);
  const auto rows = ssh_crossover_scan(config.ssh, grid, (site + 1) / 2, config.resolved_strength(), options);

  int crossings = 0;
  int failures = 0;
  std::optional<double> previous;
  json errors = json::array();
  for (const auto& row : rows) {
    if (row.error) {
      ++failures;
      errors.push_back({{"g", row.g}, {"error", *row.error}});
      continue;
    }
    const double sign = row.overlap_edge - row.overlap_slow;
    if (previous && (*previous > 0.0) != (sign > 0.0)) ++crossings;
    previous = sign;
  }
  ctx.write("crossover.csv", csv_text([&](std::ostream& o) { write_crossover_csv(o, rows, ctx.comments()); }));
  json summary = ctx.summary();
  summary["sign_changes"] = crossings;
  summary["failed_points"] = std::move(errors);
  ctx.write_json("summary.json", summary);
  ctx.log << "sign changes of O_edge - O_slow: " << crossings << "\n";
  if (failures > 0) {
    fail(ErrorKind::solve, std::to_string(failures) + " grid point(s) failed, see summary.json");
  }
  return kExitOk;
}

std::optional<JumpSet> model_jumps(const RunConfig& config, const std::vector<double>& rates) {
  switch (config.model) {
    case ModelKind::hn: return hn_jump_decomposition(config.hn, rates);
    case ModelKind::ssh: return ssh_jump_decomposition(config.ssh, rates);
    case ModelKind::custom_file: return std::nullopt;
  }
  return std::nullopt;
}

int cmd_inverse_design(const Context& ctx) {
  const RunConfig& config = ctx.config;
  const LoadedProblem problem = load_problem(config);
  MicroscopicRealization realization = inverse_design(problem.x, problem.y);
  json summary = ctx.summary();
  if (config.model != ModelKind::custom_file && config.input.empty()) {
    realization.jumps = model_jumps(config, config.pump_diagonal());
    const JumpValidation v = validate_jump_set(*realization.jumps, realization, problem.x, problem.y);
    summary["validation"] = {{"loss_gram_error", v.loss_gram_error},
                             {"gain_gram_error", v.gain_gram_error},
                             {"relaxation_error", v.relaxation_error},
                             {"source_error", v.source_error},
                             {"loss_min_eigenvalue", v.loss_min_eigenvalue},
                             {"passed", v.passed}};
    ctx.log << "validation passed, max error "
            << std::max({v.loss_gram_error, v.gain_gram_error, v.relaxation_error, v.source_error})
            << "\n";
  } else if (!realization.physical) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "loss Gram matrix has negative eigenvalue " << realization.loss_min_eigenvalue;
    throw InfeasibilityError(msg.str(), -realization.loss_min_eigenvalue, "loss Gram");
  }
  summary["realization"] = realization_to_json(realization);
  ctx.write_json("realization.json", summary);
  return kExitOk;
}

struct CheckRecorder {
  json checks = json::array();
  bool all_passed = true;

  void record(const std::string& name, double value, double tolerance, bool passed) {
    checks.push_back({{"name", name}, {"value", std::isfinite(value) ? json(value) : json(nullptr)},
                      {"tolerance", tolerance}, {"passed", passed}});
    all_passed = all_passed && passed;
  }
  void skip(const std::string& name, const std::string& reason) {
    checks.push_back({{"name", name}, {"skipped", reason}});
  }
};

int cmd_validate(const Context& ctx) {
  const LoadedProblem problem = load_problem(ctx.config);
  const CMatrix& x = problem.x;
  const CMatrix& y = problem.y;
  CheckRecorder rec;

  const double y_scale = std::max(1.0, max_abs(y));
  rec.record("source_hermitian", hermitian_defect(y), 1e-12 * y_scale, hermitian_defect(y) <= 1e-12 * y_scale);
  Eigen::SelfAdjointEigenSolver<CMatrix> y_eig(hermitian_part(y), Eigen::EigenvaluesOnly);
  const double y_min = y_eig.eigenvalues().minCoeff();
  rec.record("source_psd", y_min, -1e-12 * y_scale, y_min >= -1e-12 * y_scale);
  Eigen::ComplexEigenSolver<CMatrix> x_eig(x, false);
  const double re_min = x_eig.eigenvalues().real().minCoeff();
  rec.record("relaxation_stable", re_min, 0.0, re_min > 0.0);

  if (rec.all_passed) {
    const RelaxationMatrix rx(x, problem.labels);
    const SourceMatrix sy(y);
    const MicroscopicRealization realization = inverse_design(x, y);
    const double x_scale = std::max(1.0, max_abs(x));
    const double round_trip = max_abs(realization.relaxation() - x);
    rec.record("realization_round_trip", round_trip, 1e-12 * x_scale, round_trip <= 1e-12 * x_scale);

    const SteadyCorrelator c = solve_steady_state(rx, sy, ctx.config.solver == SolverChoice::spectral
                                                              ? SolverChoice::direct
                                                              : ctx.config.solver);
    rec.record("lyapunov_residual", c.residual, c.residual_tolerance, c.residual_ok());
    const double c_scale = std::max(1.0, max_abs(c.entries));
    rec.record("correlator_asymmetry", c.asymmetry, 1e-10 * c_scale, c.asymmetry <= 1e-10 * c_scale);

    const NaturalOrbitalSet orbitals = natural_orbitals(c);
    const double recon = density_reconstruction_error(c.entries, orbitals);
    const double recon_tol = 1e-12 * std::max(1.0, std::abs(orbitals.nu_max()));
    rec.record("density_reconstruction", recon, recon_tol, recon <= recon_tol);
    if (realization.physical) {
      const double lo = orbitals.occupations.minCoeff();
      const double hi = orbitals.occupations.maxCoeff();
      rec.record("occupation_lower", lo, -1e-10, lo >= -1e-10);
      rec.record("occupation_upper", hi, 1.0 + 1e-10, hi <= 1.0 + 1e-10);
    } else {
      rec.skip("occupation_bounds", "loss Gram matrix is not positive semidefinite");
    }

    const BiorthogonalSpectrum spectrum = pipeline_spectrum(rx);
    if (spectrum.source != SpectrumSource::numeric || spectrum.condition_estimate < kTrustedCondition) {
      const SpectrumHealth health = check_spectrum(spectrum, x);
      rec.record("spectrum_biorthogonality", health.biorthogonality_error, health.tolerance,
                 health.biorthogonality_error <= health.tolerance);
      // R L^dagger carries entries scaled by ratios up to cond, so its roundoff
      // is not meaningful above the trust threshold.
      if (spectrum.condition_estimate < kTrustedCondition) {
        rec.record("spectrum_completeness", health.completeness_error, health.tolerance,
                   health.completeness_error <= health.tolerance);
      } else {
        rec.skip("spectrum_completeness", "eigenvector condition above trust threshold");
      }
      rec.record("spectrum_residual", health.max_relative_residual, 1e-8, health.max_relative_residual <= 1e-8);
    } else {
      rec.skip("spectrum_health", "eigenvector condition above trust threshold");
    }
    if (spectrum.condition_estimate < 1e10) {
      const SteadyCorrelator spectral = solve_lyapunov_spectral(spectrum, sy);
      const double diff = (spectral.entries - c.entries).norm() / std::max(c.entries.norm(), 1e-300);
      rec.record("cross_solver_agreement", diff, 1e-6, diff <= 1e-6);
    } else {
      rec.skip("cross_solver_agreement", "eigenvector condition above 1e10");
    }
  }

  json summary = ctx.summary();
  summary["checks"] = rec.checks;
  summary["passed"] = rec.all_passed;
  ctx.write_json("validation.json", summary);
  for (const auto& check : rec.checks) {
    if (check.contains("skipped")) continue;
    ctx.log << (check["passed"].get<bool>() ? "ok   " : "FAIL ") << check["name"].get<std::string>() << "\n";
  }
  return rec.all_passed ? kExitOk : kExitValidation;
}

int cmd_oracle_check(const Context& ctx) {
  const RunConfig& config = ctx.config;
  const RelaxationMatrix x = model_relaxation(config);
  require(x.dim() <= FockOperatorSet::kMaxSites, ErrorKind::scale,
          "oracle-check supports at most " + std::to_string(FockOperatorSet::kMaxSites) + " sites");
  const auto rates = config.pump_diagonal();
  const SourceMatrix y = build_diagonal_pump(rates);
  MicroscopicRealization realization = inverse_design(x, y);
  const JumpSet jumps = *model_jumps(config, rates);
  validate_jump_set(jumps, realization, x.entries(), y.entries());

  MasterOptions options;
  options.t_final = config.t_final;
  options.dt = config.dt;
  options.stride = std::max(1, static_cast<int>(std::lround(0.1 / config.dt)));
  const FockOperatorSet ops(static_cast<int>(x.dim()));
  const MasterTrajectory trajectory = evolve_master(ops.vacuum(), realization.hamiltonian, jumps, options);

  const BiorthogonalSpectrum spectrum = pipeline_spectrum(x);
  const CMatrix c0 = CMatrix::Zero(x.dim(), x.dim());
  double trajectory_dev = 0.0;
  for (const auto& snap : trajectory.snapshots) {
    const CMatrix exact = closed_form_correlator(spectrum, y, c0, snap.time);
    trajectory_dev = std::max(trajectory_dev, max_abs(correlator_of(snap.rho, ops) - exact));
  }

  const SteadyOracleResult steady = steady_state_oracle(realization.hamiltonian, jumps);
  const SteadyCorrelator direct = solve_lyapunov_direct(x, y);
  const double steady_dev = max_abs(correlator_of(steady.rho, ops) - direct.entries);

  json summary = ctx.summary();
  summary["max_trajectory_deviation"] = trajectory_dev;
  summary["trajectory_tolerance"] = 1e-7;
  summary["max_trace_drift"] = trajectory.max_trace_drift;
  summary["steady_state_deviation"] = steady_dev;
  summary["steady_state_tolerance"] = 1e-8;
  summary["oracle_time"] = steady.time;
  ctx.write_json("oracle.json", summary);
  ctx.log << "max trajectory deviation: " << trajectory_dev << "\n"
          << "steady-state deviation: " << steady_dev << "\n";
  return trajectory_dev <= 1e-7 && steady_dev <= 1e-8 ? kExitOk : kExitValidation;
}

}  // namespace

int run_command(const std::string& name, const RunConfig& config, std::ostream& log, std::ostream& err) {
  static const std::map<std::string, int (*)(const Context&)> table = {
      {"hn-profiles", cmd_hn_profiles},       {"hn-source-scan", cmd_hn_source_scan},
      {"hn-occupations", cmd_hn_occupations}, {"ssh-profiles", cmd_ssh_profiles},
      {"ssh-crossover", cmd_ssh_crossover},   {"inverse-design", cmd_inverse_design},
      {"validate", cmd_validate},             {"oracle-check", cmd_oracle_check}};
  const auto it = table.find(name);
  if (it == table.end()) {
    err << "unknown command '" << name << "'\n";
    return kExitNumeric;
  }
  try {
    require(config.threads >= 1, ErrorKind::parameter, "threads must be >= 1");
    std::filesystem::create_directories(config.out_dir);
    return it->second(Context{config, name, log});
  } catch (const InfeasibilityError& e) {
    err << e.what() << "\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.kind() == ErrorKind::validation ? kExitValidation : kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace skinlock
