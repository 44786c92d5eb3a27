#pragma once

#include "skinlock/lattice.hpp"
#include "skinlock/linalg.hpp"

#include <utility>

namespace skinlock {

/// How a spectrum was obtained. Only `numeric` is subject to the
/// eigenvector-conditioning trust threshold.
enum class SpectrumSource { numeric, hn_closed_form, diagonal_similarity };

/// Eigenvalues beta_n of X with paired right/left eigenvectors, stored as
/// matrix columns and normalized so that <L_m|R_n> = delta_mn.
///
/// Modes are ordered by ascending real part, ties broken by ascending
/// imaginary part. Mode indices in the public API are 1-based.
struct BiorthogonalSpectrum {
  CVector betas;
  CMatrix right;
  CMatrix left;
  /// 2-norm condition number of the column-normalized right-eigenvector matrix.
  double condition_estimate = 1.0;
  SpectrumSource source = SpectrumSource::numeric;

  Index dim() const { return betas.size(); }
  CVector right_mode(int mode) const;
  CVector left_mode(int mode) const;
  /// R diag(beta) L^dagger.
  CMatrix reconstruct() const;
  double min_real_beta() const;
};

/// Numeric decompositions are trusted below this eigenvector condition number.
constexpr double kTrustedCondition = 1e12;

struct SpectrumHealth {
  double biorthogonality_error = 0.0;  ///< max |<L_m|R_n> - delta_mn|
  double completeness_error = 0.0;     ///< max |sum_n |R_n><L_n| - I|
  double max_relative_residual = 0.0;  ///< max_n |X R_n - beta_n R_n| / (|X| |R_n|)
  double tolerance = 0.0;              ///< 1e-8 max(1, cond eps dim)
  bool ok() const {
    return biorthogonality_error <= tolerance && completeness_error <= tolerance &&
           max_relative_residual <= 1e-8;
  }
};

enum class Normalization { biorthogonal, euclidean };

struct ModeVector {
  CVector amplitudes;
  Normalization normalization = Normalization::biorthogonal;

  Index dim() const { return amplitudes.size(); }
};

/// Numeric eigendecomposition of X. Left vectors are the conjugated rows of
/// the inverse right-eigenvector matrix.
BiorthogonalSpectrum biorthogonal_decompose(const RelaxationMatrix& x);

SpectrumHealth check_spectrum(const BiorthogonalSpectrum& spectrum, const CMatrix& x);

/// Closed-form Hatano-Nelson spectrum, amplitudes assembled in log domain.
BiorthogonalSpectrum hn_analytic_spectrum(const HatanoNelsonParams& params);

/// Euclidean-normalized closed-form right modes (columns), representable for
/// any chain length. Use when hn_analytic_spectrum reports envelope overflow.
CMatrix hn_normalized_right_modes(const HatanoNelsonParams& params);

/// Spectrum of a tridiagonal X with real diagonal that is diagonally similar
/// to a Hermitian matrix, X = D H D^-1 with D > 0. Covers both lattice
/// families at any nonreciprocity without a non-normal eigensolve.
BiorthogonalSpectrum diagonal_similarity_spectrum(const RelaxationMatrix& x);
bool is_diagonally_symmetrizable(const RelaxationMatrix& x);

/// max |S^-1 X S - (S^-1 X S)^dagger| with S = diag(r^j).
double hn_similarity_residual(const HatanoNelsonParams& params);

/// Edge envelopes in the topological regime t1 < t2, Euclidean-normalized:
/// right edge ratio -t1^R/t2^L, left edge ratio -t1^L/t2^R on A sites.
std::pair<ModeVector, ModeVector> ssh_edge_envelopes(const SshParams& params);

/// Unit Euclidean norm, largest-magnitude entry made real positive.
ModeVector euclidean_normalize(const ModeVector& v);
void apply_phase_gauge(Eigen::Ref<CVector> v);

ModeVector euclidean_right_mode(const BiorthogonalSpectrum& spectrum, int mode);

/// 1-based index of min Re beta; ties by min Im beta, then lowest index.
int slowest_mode(const BiorthogonalSpectrum& spectrum);

/// (Re beta_2 - Re beta_1) / Re beta_1 for an ascending-ordered spectrum.
double spectral_gap_ratio(const BiorthogonalSpectrum& spectrum);

}  // namespace skinlock
