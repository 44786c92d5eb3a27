#pragma once

#include "skinlock/lattice.hpp"
#include "skinlock/spectral.hpp"

#include <vector>

namespace skinlock {

enum class SolveMethod { direct, spectral, integrated };

std::string_view to_string(SolveMethod method);

/// Hermitian steady-state (or snapshot) correlator C_ij = Tr(rho c_j^dagger c_i).
struct SteadyCorrelator {
  CMatrix entries;
  SolveMethod method = SolveMethod::direct;
  /// |XC + CX^dagger - Y|_F / |Y|_F, NaN when not applicable (snapshots).
  double residual = 0.0;
  /// Declared bound for `residual`: the method tolerance, raised to the
  /// double-precision floor 64 eps |X|_F |C|_F / |Y|_F when that is larger.
  double residual_tolerance = 0.0;
  /// Max element of |C - C^dagger| before symmetrization.
  double asymmetry = 0.0;
  double time = 0.0;

  Index dim() const { return entries.rows(); }
  bool residual_ok() const { return residual <= residual_tolerance; }
};

/// Linear-solver route behind solve_lyapunov_direct.
enum class DirectRoute {
  /// (I kron X + conj(X) kron I) vec(C) = vec(Y); O(N^6), reference.
  vectorized,
  /// Complex Schur form plus triangular back substitution; O(N^3).
  schur,
};

constexpr double kDirectTolerance = 1e-10;

SteadyCorrelator solve_lyapunov_direct(const RelaxationMatrix& x, const SourceMatrix& y,
                                       DirectRoute route = DirectRoute::vectorized);

/// Biorthogonal double sum over modes. The residual is measured against the
/// matrix reconstructed from the spectrum.
SteadyCorrelator solve_lyapunov_spectral(const BiorthogonalSpectrum& spectrum,
                                         const SourceMatrix& y);

double lyapunov_residual(const CMatrix& x, const CMatrix& y, const CMatrix& c);

struct SingleModeApproximation {
  SteadyCorrelator rank1;
  int slow_mode = 1;
  /// A_0(s) = Gamma |L_0(s)|^2 / (2 Re beta_0).
  double loading = 0.0;
  /// A_0(s) <R_0|R_0>.
  double predicted_nu_max = 0.0;
};

SingleModeApproximation single_mode_approximation(const BiorthogonalSpectrum& spectrum, int site,
                                                  double strength);

struct PropagationOptions {
  double t_final = 10.0;
  /// <= 0 selects 0.01 / max|beta| (estimated from a Gershgorin bound).
  double dt = 0.0;
  /// Keep every `stride`-th step (plus t = 0 and the final time).
  int stride = 1;
};

std::vector<SteadyCorrelator> propagate_correlator(const RelaxationMatrix& x,
                                                   const SourceMatrix& y, const CMatrix& c0,
                                                   const PropagationOptions& options);

/// C(t) = e^{-Xt} C0 e^{-X^dagger t} + int_0^t e^{-Xu} Y e^{-X^dagger u} du in the eigenbasis.
CMatrix closed_form_correlator(const BiorthogonalSpectrum& spectrum, const SourceMatrix& y,
                               const CMatrix& c0, double t);

/// Throws a stability error unless every eigenvalue of X has Re > 0.
void require_stable(const CVector& betas);

}  // namespace skinlock
