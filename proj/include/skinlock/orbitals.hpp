#pragma once

#include "skinlock/lattice.hpp"
#include "skinlock/spectral.hpp"
#include "skinlock/steady_state.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace skinlock {

/// Eigen-decomposition of a correlator: occupations descending, orbitals
/// as phase-gauged orthonormal columns.
struct NaturalOrbitalSet {
  RVector occupations;
  CMatrix orbitals;
  /// nu_1 and nu_2 agree to 1e-10 relative; the dominant orbital is ambiguous.
  bool dominant_tie = false;

  Index dim() const { return occupations.size(); }
  double nu_max() const { return occupations(0); }
  CVector dominant() const { return orbitals.col(0); }
  /// nu_alpha / nu_max.
  RVector normalized_occupations() const;
};

NaturalOrbitalSet natural_orbitals(const CMatrix& correlator);
inline NaturalOrbitalSet natural_orbitals(const SteadyCorrelator& c) {
  return natural_orbitals(c.entries);
}

RVector density(const CMatrix& correlator);
RVector normalized_density(const CMatrix& correlator);

/// Largest |sum_alpha nu_alpha |phi_alpha(j)|^2 - n_j| over sites.
double density_reconstruction_error(const CMatrix& correlator, const NaturalOrbitalSet& orbitals);

struct Loadings {
  RVector values;      ///< A_n(s) = Gamma |L_n(s)|^2 / (2 Re beta_n)
  RVector normalized;  ///< A_n / max_m A_m
};

Loadings loading_factors(const BiorthogonalSpectrum& spectrum, int site, double strength);

/// |<mode|orbital>|^2 for two unit vectors.
double overlap(const ModeVector& mode, const CVector& orbital);

int identify_slow_mode(const BiorthogonalSpectrum& spectrum);

struct EdgeCandidateOptions {
  /// Window half-width as a fraction of the spectral range.
  double window_fraction = 0.1;
  /// Sites per unit cell used for the boundary weight.
  int cell_size = 1;
};

struct EdgeCandidate {
  int mode = 1;
  int window_occupancy = 0;
  bool fallback = false;  ///< window empty, nearest-to-kappa mode returned
  double boundary_weight = 0.0;
};

EdgeCandidate identify_edge_candidate(const BiorthogonalSpectrum& spectrum, double kappa,
                                      const EdgeCandidateOptions& options = {});

struct DiagnosticsReport {
  RVector density;
  RVector normalized_density;
  RVector occupation_spectrum_normalized;
  std::map<std::string, double> overlaps;
  Loadings loadings;
};

/// Bundles the density-level and mode-resolved diagnostics of one steady state.
/// `modes` maps overlap names to 1-based mode indices of `spectrum`.
DiagnosticsReport diagnose(const CMatrix& correlator, const NaturalOrbitalSet& orbitals,
                           const BiorthogonalSpectrum& spectrum, int site, double strength,
                           const std::map<std::string, int>& modes);

enum class SolverChoice { direct, direct_vectorized, spectral };

struct ScanOptions {
  SolverChoice solver = SolverChoice::direct;
  int threads = 1;
  EdgeCandidateOptions edge{0.1, 2};
};

/// Spectrum used by the pipelines: the diagonal-similarity route for
/// symmetrizable chains (both lattice families), numeric otherwise.
BiorthogonalSpectrum pipeline_spectrum(const RelaxationMatrix& x);

SteadyCorrelator solve_steady_state(const RelaxationMatrix& x, const SourceMatrix& y,
                                    SolverChoice solver,
                                    const BiorthogonalSpectrum* spectrum = nullptr);

struct SourceScanRow {
  int site = 0;
  double nu_max = 0.0;
  double loading = 0.0;  ///< analytic A_1(s)
  double nu_max_norm = 0.0;
  double loading_norm = 0.0;
};

std::vector<SourceScanRow> hn_source_scan(const HatanoNelsonParams& params, double strength,
                                          const std::vector<int>& sites,
                                          const ScanOptions& options = {});

struct CrossoverRow {
  double g = 0.0;
  double overlap_edge = 0.0;
  double overlap_slow = 0.0;
  int edge_mode = 0;
  int slow_mode = 0;
  bool dominant_tie = false;
  std::optional<std::string> error;  ///< set when this grid point failed
};

std::vector<CrossoverRow> ssh_crossover_scan(const SshParams& base, const std::vector<double>& g_values,
                                             int pump_cell, double strength,
                                             const ScanOptions& options = {});

std::vector<double> uniform_grid(double lo, double hi, int points);

/// Default crossover grid: 24 points over [-0.55, 0.60].
std::vector<double> default_crossover_grid();

}  // namespace skinlock
