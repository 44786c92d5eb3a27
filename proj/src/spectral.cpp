#include "skinlock/spectral.hpp"

#include "skinlock/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

namespace skinlock {

namespace {

// Largest exponent we allow before exp() overflows double.
constexpr double kMaxLogAmplitude = 700.0;

std::vector<Index> ascending_order(const CVector& betas) {
  std::vector<Index> order(static_cast<std::size_t>(betas.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (betas(a).real() != betas(b).real()) return betas(a).real() < betas(b).real();
    return betas(a).imag() < betas(b).imag();
  });
  return order;
}

double eigvec_condition(const CMatrix& right) {
  CMatrix normalized = right;
  for (Index n = 0; n < normalized.cols(); ++n) {
    const double norm = normalized.col(n).norm();
    if (norm > 0.0) normalized.col(n) /= norm;
  }
  Eigen::JacobiSVD<CMatrix> svd(normalized);
  const RVector& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (smallest <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(1.0, sv(0) / smallest);
}

// sin(n pi j / (N+1)) with exact zeros at the nodes.
double sine_mode(long n, long j, long n_sites) {
  const long period = 2 * (n_sites + 1);
  const long k = (n * j) % period;
  if (k % (n_sites + 1) == 0) return 0.0;
  return std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_sites + 1));
}

void check_mode(const BiorthogonalSpectrum& s, int mode) {
  require(mode >= 1 && mode <= s.dim(), ErrorKind::index,
          "mode " + std::to_string(mode) + " outside 1.." + std::to_string(s.dim()));
}

}  // namespace

CVector BiorthogonalSpectrum::right_mode(int mode) const {
  check_mode(*this, mode);
  return right.col(mode - 1);
}

CVector BiorthogonalSpectrum::left_mode(int mode) const {
  check_mode(*this, mode);
  return left.col(mode - 1);
}

CMatrix BiorthogonalSpectrum::reconstruct() const {
  return right * betas.asDiagonal() * left.adjoint();
}

double BiorthogonalSpectrum::min_real_beta() const {
  return betas.real().minCoeff();
}

BiorthogonalSpectrum biorthogonal_decompose(const RelaxationMatrix& x) {
  const Index n = x.dim();
  Eigen::ComplexEigenSolver<CMatrix> solver(x.entries(), true);
  require(solver.info() == Eigen::Success, ErrorKind::decomposition,
          "eigensolver did not converge");

  const auto order = ascending_order(solver.eigenvalues());
  BiorthogonalSpectrum spectrum;
  spectrum.source = SpectrumSource::numeric;
  spectrum.betas.resize(n);
  spectrum.right.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    spectrum.betas(k) = solver.eigenvalues()(src);
    spectrum.right.col(k) = solver.eigenvectors().col(src).normalized();
  }
  spectrum.condition_estimate = eigvec_condition(spectrum.right);

  double range = 0.0;
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b)
      range = std::max(range, std::abs(spectrum.betas(a) - spectrum.betas(b)));
  if (spectrum.condition_estimate > kTrustedCondition) {
    for (Index a = 0; a < n; ++a) {
      for (Index b = a + 1; b < n; ++b) {
        if (std::abs(spectrum.betas(a) - spectrum.betas(b)) <= 1e-10 * range) {
          fail(ErrorKind::degeneracy,
               "near-defective eigenvalue pair (" + std::to_string(a + 1) + ", " +
                   std::to_string(b + 1) + "), eigenvector condition " +
                   std::to_string(spectrum.condition_estimate));
        }
      }
    }
  }
  require(std::isfinite(spectrum.condition_estimate) && spectrum.condition_estimate < 1e18,
          ErrorKind::decomposition, "right-eigenvector matrix is numerically singular");

  const CMatrix inverse = spectrum.right.partialPivLu().inverse();
  spectrum.left = inverse.adjoint();
  require(all_finite(spectrum.left), ErrorKind::decomposition,
          "right-eigenvector matrix inversion produced non-finite values");
  return spectrum;
}

SpectrumHealth check_spectrum(const BiorthogonalSpectrum& spectrum, const CMatrix& x) {
  const Index n = spectrum.dim();
  const CMatrix identity = CMatrix::Identity(n, n);
  SpectrumHealth health;
  health.biorthogonality_error = max_abs(spectrum.left.adjoint() * spectrum.right - identity);
  health.completeness_error = max_abs(spectrum.right * spectrum.left.adjoint() - identity);
  const double x_norm = x.norm();
  for (Index k = 0; k < n; ++k) {
    const CVector r = spectrum.right.col(k);
    const double denom = std::max(x_norm * r.norm(), std::numeric_limits<double>::min());
    health.max_relative_residual = std::max(
        health.max_relative_residual, (x * r - spectrum.betas(k) * r).norm() / denom);
  }
  health.tolerance = 1e-8 * std::max(1.0, spectrum.condition_estimate * kEps * static_cast<double>(n));
  return health;
}

BiorthogonalSpectrum hn_analytic_spectrum(const HatanoNelsonParams& params) {
  require(params.n_sites >= 1, ErrorKind::parameter, "n_sites must be >= 1");
  require(params.t_right > 0.0 && params.t_left > 0.0, ErrorKind::parameter,
          "Hatano-Nelson hoppings must be positive");
  const long n_sites = params.n_sites;
  const Index n = n_sites;
  const double log_r = 0.5 * (std::log(params.t_right) - std::log(params.t_left));
  const double coupling = 2.0 * std::sqrt(params.t_right * params.t_left);
  const double log_norm = 0.5 * std::log(2.0 / static_cast<double>(n_sites + 1));

  if (static_cast<double>(n_sites) * std::abs(log_r) + log_norm > kMaxLogAmplitude) {
    fail(ErrorKind::envelope_overflow,
         "r^N envelope exceeds double range (N log r = " +
             std::to_string(static_cast<double>(n_sites) * log_r) +
             "); use hn_normalized_right_modes for Euclidean-normalized profiles");
  }

  BiorthogonalSpectrum spectrum;
  spectrum.source = SpectrumSource::hn_closed_form;
  spectrum.betas.resize(n);
  spectrum.right.resize(n, n);
  spectrum.left.resize(n, n);
  for (long mode = 1; mode <= n_sites; ++mode) {
    spectrum.betas(mode - 1) =
        params.kappa - coupling * std::cos(std::numbers::pi * static_cast<double>(mode) /
                                           static_cast<double>(n_sites + 1));
    for (long j = 1; j <= n_sites; ++j) {
      const double s = sine_mode(mode, j, n_sites);
      if (s == 0.0) {
        spectrum.right(j - 1, mode - 1) = 0.0;
        spectrum.left(j - 1, mode - 1) = 0.0;
        continue;
      }
      const double sign = s > 0.0 ? 1.0 : -1.0;
      const double log_phi = log_norm + std::log(std::abs(s));
      const double shift = static_cast<double>(j) * log_r;
      spectrum.right(j - 1, mode - 1) = sign * std::exp(log_phi + shift);
      spectrum.left(j - 1, mode - 1) = sign * std::exp(log_phi - shift);
    }
  }
  spectrum.condition_estimate = eigvec_condition(spectrum.right);
  return spectrum;
}

CMatrix hn_normalized_right_modes(const HatanoNelsonParams& params) {
  require(params.n_sites >= 1, ErrorKind::parameter, "n_sites must be >= 1");
  require(params.t_right > 0.0 && params.t_left > 0.0, ErrorKind::parameter,
          "Hatano-Nelson hoppings must be positive");
  const long n_sites = params.n_sites;
  const double log_r = 0.5 * (std::log(params.t_right) - std::log(params.t_left));
  CMatrix modes = CMatrix::Zero(n_sites, n_sites);
  std::vector<double> logs(static_cast<std::size_t>(n_sites));
  for (long mode = 1; mode <= n_sites; ++mode) {
    double peak = -std::numeric_limits<double>::infinity();
    for (long j = 1; j <= n_sites; ++j) {
      const double s = sine_mode(mode, j, n_sites);
      logs[static_cast<std::size_t>(j - 1)] =
          s == 0.0 ? -std::numeric_limits<double>::infinity()
                   : std::log(std::abs(s)) + static_cast<double>(j) * log_r;
      peak = std::max(peak, logs[static_cast<std::size_t>(j - 1)]);
    }
    for (long j = 1; j <= n_sites; ++j) {
      const double s = sine_mode(mode, j, n_sites);
      if (s == 0.0) continue;
      modes(j - 1, mode - 1) =
          (s > 0.0 ? 1.0 : -1.0) * std::exp(logs[static_cast<std::size_t>(j - 1)] - peak);
    }
    modes.col(mode - 1).normalize();
    apply_phase_gauge(modes.col(mode - 1));
  }
  return modes;
}

bool is_diagonally_symmetrizable(const RelaxationMatrix& x) {
  const CMatrix& m = x.entries();
  const Index n = x.dim();
  for (Index i = 0; i < n; ++i) {
    if (m(i, i).imag() != 0.0) return false;
    for (Index j = 0; j < n; ++j)
      if (std::abs(i - j) > 1 && m(i, j) != cdouble(0.0)) return false;
  }
  for (Index i = 0; i + 1 < n; ++i) {
    const cdouble below = m(i + 1, i);
    const cdouble above = m(i, i + 1);
    if (below == cdouble(0.0) && above == cdouble(0.0)) continue;
    if (below == cdouble(0.0) || above == cdouble(0.0)) return false;
    const cdouble q = std::conj(below) / above;
    if (q.real() <= 0.0 || std::abs(q.imag()) > 1e-14 * std::abs(q)) return false;
  }
  return true;
}

BiorthogonalSpectrum diagonal_similarity_spectrum(const RelaxationMatrix& x) {
  require(is_diagonally_symmetrizable(x), ErrorKind::decomposition,
          "matrix is not a tridiagonal diagonally-symmetrizable chain");
  const CMatrix& m = x.entries();
  const Index n = x.dim();

  // log d_j, then centered so R and L share the representable range.
  RVector log_d = RVector::Zero(n);
  for (Index i = 0; i + 1 < n; ++i) {
    const cdouble below = m(i + 1, i);
    const cdouble above = m(i, i + 1);
    double step = 0.0;
    if (above != cdouble(0.0)) step = 0.5 * std::log((std::conj(below) / above).real());
    log_d(i + 1) = log_d(i) + step;
  }
  const double center = 0.5 * (log_d.maxCoeff() + log_d.minCoeff());
  log_d.array() -= center;
  if (log_d.cwiseAbs().maxCoeff() > kMaxLogAmplitude) {
    fail(ErrorKind::envelope_overflow, "similarity envelope exceeds double range");
  }

  CMatrix h = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) h(i, i) = m(i, i).real();
  for (Index i = 0; i + 1 < n; ++i) {
    const cdouble upper = m(i, i + 1) * std::exp(log_d(i + 1) - log_d(i));
    h(i, i + 1) = upper;
    h(i + 1, i) = std::conj(upper);
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  require(eig.info() == Eigen::Success, ErrorKind::decomposition,
          "Hermitian reference eigensolve failed");

  BiorthogonalSpectrum spectrum;
  spectrum.source = SpectrumSource::diagonal_similarity;
  spectrum.betas = eig.eigenvalues().cast<cdouble>();
  const RVector d = log_d.array().exp();
  const RVector d_inv = (-log_d).array().exp();
  spectrum.right = d.asDiagonal() * eig.eigenvectors();
  spectrum.left = d_inv.asDiagonal() * eig.eigenvectors();
  spectrum.condition_estimate = eigvec_condition(spectrum.right);
  return spectrum;
}

double hn_similarity_residual(const HatanoNelsonParams& params) {
  const double log_r = 0.5 * (std::log(params.t_right) - std::log(params.t_left));
  require(static_cast<double>(params.n_sites) * std::abs(log_r) < 600.0,
          ErrorKind::envelope_overflow,
          "N |log r| >= 600, similarity transform is not representable");
  const RelaxationMatrix x = build_hatano_nelson(params);
  const Index n = x.dim();
  RVector s(n), s_inv(n);
  for (Index j = 0; j < n; ++j) {
    s(j) = std::exp(static_cast<double>(j + 1) * log_r);
    s_inv(j) = 1.0 / s(j);
  }
  const CMatrix transformed = s_inv.asDiagonal() * x.entries() * s.asDiagonal();
  return hermitian_defect(transformed);
}

std::pair<ModeVector, ModeVector> ssh_edge_envelopes(const SshParams& params) {
  require(params.n_cells >= 1, ErrorKind::parameter, "n_cells must be >= 1");
  require(params.t1 > 0.0 && params.t2 > 0.0, ErrorKind::parameter,
          "SSH hoppings must be positive");
  require(params.t1 < params.t2, ErrorKind::regime,
          "edge candidate requires the topological regime t1 < t2");

  const auto envelope = [&](double ratio) {
    const Index n = 2 * static_cast<Index>(params.n_cells);
    const double log_q = std::log(std::abs(ratio));
    const double peak = log_q > 0.0 ? static_cast<double>(params.n_cells - 1) * log_q : 0.0;
    ModeVector v{CVector::Zero(n), Normalization::biorthogonal};
    for (int cell = 1; cell <= params.n_cells; ++cell) {
      const double sign = (ratio < 0.0 && (cell - 1) % 2 == 1) ? -1.0 : 1.0;
      v.amplitudes(ssh_index(cell, Sublattice::A, params.n_cells) - 1) =
          sign * std::exp(static_cast<double>(cell - 1) * log_q - peak);
    }
    return euclidean_normalize(v);
  };
  const double right_ratio = -params.t1_right() / params.t2_left();
  const double left_ratio = -params.t1_left() / params.t2_right();
  return {envelope(right_ratio), envelope(left_ratio)};
}

void apply_phase_gauge(Eigen::Ref<CVector> v) {
  if (v.size() == 0) return;
  Index peak = 0;
  v.cwiseAbs().maxCoeff(&peak);
  const double magnitude = std::abs(v(peak));
  if (magnitude == 0.0) return;
  v *= std::conj(v(peak)) / magnitude;
  v(peak) = magnitude;
}

ModeVector euclidean_normalize(const ModeVector& v) {
  const double norm = v.amplitudes.norm();
  require(norm > 0.0 && std::isfinite(norm), ErrorKind::normalization,
          "cannot normalize a zero or non-finite vector");
  ModeVector out{v.amplitudes / norm, Normalization::euclidean};
  apply_phase_gauge(out.amplitudes);
  return out;
}

ModeVector euclidean_right_mode(const BiorthogonalSpectrum& spectrum, int mode) {
  return euclidean_normalize(ModeVector{spectrum.right_mode(mode), Normalization::biorthogonal});
}

int slowest_mode(const BiorthogonalSpectrum& spectrum) {
  require(spectrum.dim() >= 1, ErrorKind::parameter, "empty spectrum");
  Index best = 0;
  for (Index k = 1; k < spectrum.dim(); ++k) {
    const cdouble b = spectrum.betas(k);
    const cdouble cur = spectrum.betas(best);
    if (b.real() < cur.real() || (b.real() == cur.real() && b.imag() < cur.imag())) best = k;
  }
  return static_cast<int>(best) + 1;
}

double spectral_gap_ratio(const BiorthogonalSpectrum& spectrum) {
  if (spectrum.dim() < 2) return std::numeric_limits<double>::infinity();
  const double slow = spectrum.betas(0).real();
  const double second = spectrum.betas(1).real();
  return (second - slow) / slow;
}

}  // namespace skinlock
