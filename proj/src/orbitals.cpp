#include "skinlock/orbitals.hpp"

#include "skinlock/errors.hpp"
#include "skinlock/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace skinlock {

RVector NaturalOrbitalSet::normalized_occupations() const {
  require(dim() > 0 && nu_max() > 0.0, ErrorKind::normalization,
          "dominant occupation is not positive");
  return occupations / nu_max();
}

NaturalOrbitalSet natural_orbitals(const CMatrix& correlator) {
  require(correlator.rows() > 0 && correlator.rows() == correlator.cols(), ErrorKind::parameter,
          "correlator must be square and non-empty");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(correlator));
  require(eig.info() == Eigen::Success, ErrorKind::decomposition,
          "Hermitian eigensolve of the correlator failed");
  const Index n = correlator.rows();
  NaturalOrbitalSet set;
  set.occupations = eig.eigenvalues().reverse();
  set.orbitals = eig.eigenvectors().rowwise().reverse();
  for (Index a = 0; a < n; ++a) apply_phase_gauge(set.orbitals.col(a));
  if (n > 1) {
    const double scale = std::abs(set.occupations(0));
    set.dominant_tie = scale > 0.0 && (set.occupations(0) - set.occupations(1)) <= 1e-10 * scale;
  }
  return set;
}

RVector density(const CMatrix& correlator) {
  return correlator.diagonal().real();
}

RVector normalized_density(const CMatrix& correlator) {
  const RVector n = density(correlator);
  const double total = n.sum();
  require(total > 0.0 && std::isfinite(total), ErrorKind::normalization,
          "total density is not positive");
  return n / total;
}

double density_reconstruction_error(const CMatrix& correlator, const NaturalOrbitalSet& orbitals) {
  const RVector n = density(correlator);
  const RVector rebuilt = orbitals.orbitals.cwiseAbs2() * orbitals.occupations;
  return (rebuilt - n).cwiseAbs().maxCoeff();
}

Loadings loading_factors(const BiorthogonalSpectrum& spectrum, int site, double strength) {
  require(site >= 1 && site <= spectrum.dim(), ErrorKind::index,
          "pump site " + std::to_string(site) + " outside 1.." + std::to_string(spectrum.dim()));
  require_stable(spectrum.betas);
  Loadings out;
  out.values.resize(spectrum.dim());
  for (Index m = 0; m < spectrum.dim(); ++m) {
    out.values(m) = strength * std::norm(spectrum.left(site - 1, m)) /
                    (2.0 * spectrum.betas(m).real());
  }
  const double peak = out.values.maxCoeff();
  out.normalized = peak > 0.0 ? RVector(out.values / peak) : RVector::Zero(spectrum.dim());
  return out;
}

double overlap(const ModeVector& mode, const CVector& orbital) {
  require(mode.dim() == orbital.size(), ErrorKind::parameter, "overlap dimension mismatch");
  require(std::abs(mode.amplitudes.norm() - 1.0) <= 1e-10 && std::abs(orbital.norm() - 1.0) <= 1e-10,
          ErrorKind::normalization, "overlap requires unit-normalized vectors");
  return std::norm(mode.amplitudes.dot(orbital));
}

int identify_slow_mode(const BiorthogonalSpectrum& spectrum) {
  return slowest_mode(spectrum);
}

EdgeCandidate identify_edge_candidate(const BiorthogonalSpectrum& spectrum, double kappa,
                                      const EdgeCandidateOptions& options) {
  const Index n = spectrum.dim();
  require(n >= 1, ErrorKind::parameter, "empty spectrum");
  const Index cell = std::clamp<Index>(options.cell_size, 1, n);

  double range = 0.0;
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b)
      range = std::max(range, std::abs(spectrum.betas(a) - spectrum.betas(b)));
  const double window = options.window_fraction * range;

  const auto boundary_weight = [&](Index m) {
    const ModeVector unit = euclidean_right_mode(spectrum, static_cast<int>(m) + 1);
    const double first = unit.amplitudes.head(cell).squaredNorm();
    const double last = unit.amplitudes.tail(cell).squaredNorm();
    return std::max(first, last);
  };

  EdgeCandidate best;
  double best_weight = -1.0;
  for (Index m = 0; m < n; ++m) {
    if (std::abs(spectrum.betas(m) - kappa) > window) continue;
    ++best.window_occupancy;
    const double weight = boundary_weight(m);
    if (weight > best_weight) {
      best_weight = weight;
      best.mode = static_cast<int>(m) + 1;
    }
  }
  if (best.window_occupancy == 0) {
    best.fallback = true;
    double nearest = std::numeric_limits<double>::infinity();
    for (Index m = 0; m < n; ++m) {
      const double distance = std::abs(spectrum.betas(m) - kappa);
      if (distance < nearest) {
        nearest = distance;
        best.mode = static_cast<int>(m) + 1;
      }
    }
    best_weight = boundary_weight(best.mode - 1);
  }
  best.boundary_weight = best_weight;
  return best;
}

DiagnosticsReport diagnose(const CMatrix& correlator, const NaturalOrbitalSet& orbitals,
                           const BiorthogonalSpectrum& spectrum, int site, double strength,
                           const std::map<std::string, int>& modes) {
  DiagnosticsReport report;
  report.density = density(correlator);
  report.normalized_density = normalized_density(correlator);
  report.occupation_spectrum_normalized = orbitals.normalized_occupations();
  const CVector dominant = orbitals.dominant();
  for (const auto& [name, mode] : modes) {
    report.overlaps[name] = overlap(euclidean_right_mode(spectrum, mode), dominant);
  }
  report.loadings = loading_factors(spectrum, site, strength);
  return report;
}

BiorthogonalSpectrum pipeline_spectrum(const RelaxationMatrix& x) {
  if (is_diagonally_symmetrizable(x)) return diagonal_similarity_spectrum(x);
  return biorthogonal_decompose(x);
}

SteadyCorrelator solve_steady_state(const RelaxationMatrix& x, const SourceMatrix& y,
                                    SolverChoice solver, const BiorthogonalSpectrum* spectrum) {
  switch (solver) {
    case SolverChoice::direct: return solve_lyapunov_direct(x, y, DirectRoute::schur);
    case SolverChoice::direct_vectorized: return solve_lyapunov_direct(x, y, DirectRoute::vectorized);
    case SolverChoice::spectral:
      if (spectrum != nullptr) return solve_lyapunov_spectral(*spectrum, y);
      return solve_lyapunov_spectral(pipeline_spectrum(x), y);
  }
  fail(ErrorKind::parameter, "unknown solver");
}

std::vector<SourceScanRow> hn_source_scan(const HatanoNelsonParams& params, double strength,
                                          const std::vector<int>& sites,
                                          const ScanOptions& options) {
  require(!sites.empty(), ErrorKind::parameter, "source scan needs at least one site");
  const RelaxationMatrix x = build_hatano_nelson(params);
  const BiorthogonalSpectrum analytic = hn_analytic_spectrum(params);
  require_stable(analytic.betas);

  std::vector<SourceScanRow> rows(sites.size());
  const auto errors = parallel_for(sites.size(), options.threads, [&](std::size_t i) {
    const int site = sites[i];
    const SourceMatrix y = build_local_pump(params.n_sites, site, strength);
    const SteadyCorrelator c = solve_steady_state(x, y, options.solver, &analytic);
    rows[i].site = site;
    rows[i].nu_max = natural_orbitals(c).nu_max();
    rows[i].loading = loading_factors(analytic, site, strength).values(0);
  });
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), "source scan failed at s = " + std::to_string(sites[i]) + ": " + e.what());
    }
  }

  double nu_peak = 0.0, loading_peak = 0.0;
  for (const auto& row : rows) {
    nu_peak = std::max(nu_peak, row.nu_max);
    loading_peak = std::max(loading_peak, row.loading);
  }
  require(nu_peak > 0.0 && loading_peak > 0.0, ErrorKind::normalization,
          "source scan has no positive occupation or loading");
  for (auto& row : rows) {
    row.nu_max_norm = row.nu_max / nu_peak;
    row.loading_norm = row.loading / loading_peak;
  }
  return rows;
}

std::vector<CrossoverRow> ssh_crossover_scan(const SshParams& base, const std::vector<double>& g_values,
                                             int pump_cell, double strength,
                                             const ScanOptions& options) {
  require(base.t1 < base.t2, ErrorKind::regime, "crossover scan requires t1 < t2");
  const int site = ssh_index(pump_cell, Sublattice::A, base.n_cells);
  const SourceMatrix y = build_local_pump(2 * base.n_cells, site, strength);

  std::vector<CrossoverRow> rows(g_values.size());
  const auto errors = parallel_for(g_values.size(), options.threads, [&](std::size_t i) {
    SshParams params = base;
    params.g = g_values[i];
    rows[i].g = params.g;
    const RelaxationMatrix x = build_ssh(params);
    const BiorthogonalSpectrum spectrum = pipeline_spectrum(x);
    const SteadyCorrelator c = solve_steady_state(x, y, options.solver, &spectrum);
    const NaturalOrbitalSet orbitals = natural_orbitals(c);
    rows[i].slow_mode = identify_slow_mode(spectrum);
    rows[i].edge_mode = identify_edge_candidate(spectrum, params.kappa, options.edge).mode;
    const CVector dominant = orbitals.dominant();
    rows[i].overlap_slow = overlap(euclidean_right_mode(spectrum, rows[i].slow_mode), dominant);
    rows[i].overlap_edge = overlap(euclidean_right_mode(spectrum, rows[i].edge_mode), dominant);
    rows[i].dominant_tie = orbitals.dominant_tie;
  });
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      rows[i].g = g_values[i];
      rows[i].error = e.what();
    }
  }
  return rows;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
  require(points >= 1, ErrorKind::parameter, "grid needs at least one point");
  if (points == 1) return {lo};
  std::vector<double> grid(static_cast<std::size_t>(points));
  // Snapped to 1e-12 so decimal grids hit their literal values (0, 0.2, ...).
  for (int k = 0; k < points; ++k) {
    const double v = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    grid[static_cast<std::size_t>(k)] = std::round(v * 1e12) / 1e12;
  }
  return grid;
}

std::vector<double> default_crossover_grid() {
  return uniform_grid(-0.55, 0.60, 24);
}

}  // namespace skinlock
