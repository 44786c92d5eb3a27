#pragma once

#include "skinlock/inverse_design.hpp"
#include "skinlock/linalg.hpp"

#include <vector>

namespace skinlock {

/// Fock-space fermion operators for up to four modes, Jordan-Wigner ordered
/// by site index (site 1 carries no sign string).
class FockOperatorSet {
public:
  static constexpr int kMaxSites = 4;

  explicit FockOperatorSet(int n_sites);

  int n_sites() const { return n_sites_; }
  Index hilbert_dim() const { return Index{1} << n_sites_; }
  /// 1-based site.
  const CMatrix& annihilator(int site) const;
  CMatrix creator(int site) const { return annihilator(site).adjoint(); }
  const CMatrix& number(int site) const;

  /// Largest deviation from {c_i, c_j^dagger} = delta_ij, {c_i, c_j} = 0.
  double anticommutation_error() const;

  /// |0...0>, the fully filled state and c_k^dagger|0>.
  CMatrix vacuum() const;
  CMatrix filled() const;
  CMatrix single_particle(int site) const;

private:
  int n_sites_;
  std::vector<CMatrix> annihilators_;
  std::vector<CMatrix> numbers_;
};

struct DensityMatrixHealth {
  double hermitian_defect = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  bool ok() const { return hermitian_defect <= 1e-12 && trace_error <= 1e-10 && min_eigenvalue >= -1e-8; }
};

DensityMatrixHealth check_density_matrix(const CMatrix& rho);

/// Full Lindblad generator for H = sum h_ij c_i^dagger c_j and the jumps of a JumpSet.
class LindbladGenerator {
public:
  LindbladGenerator(const FockOperatorSet& ops, const CMatrix& h, const JumpSet& jumps);

  CMatrix apply(const CMatrix& rho) const;
  /// Rough bound on the generator's spectral radius.
  double rate_bound() const { return rate_bound_; }

private:
  CMatrix effective_;  // H - (i/2) sum L^dagger L
  std::vector<CMatrix> jumps_;
  double rate_bound_ = 0.0;
};

struct MasterSnapshot {
  double time = 0.0;
  CMatrix rho;
};

struct MasterOptions {
  double t_final = 10.0;
  double dt = 0.005;
  int stride = 1;
};

struct MasterTrajectory {
  std::vector<MasterSnapshot> snapshots;
  double max_trace_drift = 0.0;
};

MasterTrajectory evolve_master(const CMatrix& rho0, const CMatrix& h, const JumpSet& jumps,
                               const MasterOptions& options);

/// C_ij = Tr(rho c_j^dagger c_i), symmetrized.
CMatrix correlator_of(const CMatrix& rho, const FockOperatorSet& ops);
CMatrix correlator_of(const CMatrix& rho);

struct SteadyOracleOptions {
  double derivative_tolerance = 1e-12;
  /// <= 0 selects a step from the generator rate bound.
  double dt = 0.0;
  /// Time budget in units of 1 / min Re beta.
  double budget = 50.0;
};

struct SteadyOracleResult {
  CMatrix rho;
  double time = 0.0;
  double derivative_norm = 0.0;
};

SteadyOracleResult steady_state_oracle(const CMatrix& h, const JumpSet& jumps,
                                       const SteadyOracleOptions& options = {});

}  // namespace skinlock
