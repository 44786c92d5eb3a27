#include "skinlock/lattice.hpp"

#include "skinlock/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace skinlock {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::index: return "index";
    case ErrorKind::degeneracy: return "degeneracy";
    case ErrorKind::decomposition: return "decomposition";
    case ErrorKind::envelope_overflow: return "envelope-overflow";
    case ErrorKind::stability: return "stability";
    case ErrorKind::solve: return "solve";
    case ErrorKind::dark_source: return "dark-source";
    case ErrorKind::step_size: return "step-size";
    case ErrorKind::normalization: return "normalization";
    case ErrorKind::infeasibility: return "infeasibility";
    case ErrorKind::validation: return "validation";
    case ErrorKind::scale: return "scale";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::regime: return "regime";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

std::vector<std::string> numeric_labels(int dim) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(dim));
  for (int j = 1; j <= dim; ++j) labels.push_back(std::to_string(j));
  return labels;
}

std::vector<std::string> ssh_labels(int n_cells) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(2 * n_cells));
  for (int n = 1; n <= n_cells; ++n) {
    labels.push_back(std::to_string(n) + "A");
    labels.push_back(std::to_string(n) + "B");
  }
  return labels;
}

RelaxationMatrix::RelaxationMatrix(CMatrix entries, std::vector<std::string> labels)
    : entries_(std::move(entries)), labels_(std::move(labels)) {
  require(entries_.rows() > 0, ErrorKind::parameter, "relaxation matrix must be non-empty");
  require(entries_.rows() == entries_.cols(), ErrorKind::parameter,
          "relaxation matrix must be square");
  require(all_finite(entries_), ErrorKind::parameter, "relaxation matrix has non-finite entries");
  require(static_cast<Index>(labels_.size()) == entries_.rows(), ErrorKind::parameter,
          "label count does not match matrix dimension");
}

RelaxationMatrix::RelaxationMatrix(CMatrix entries)
    : RelaxationMatrix(entries, numeric_labels(static_cast<int>(entries.rows()))) {}

SourceMatrix::SourceMatrix(CMatrix entries) : entries_(std::move(entries)) {
  require(entries_.rows() > 0 && entries_.rows() == entries_.cols(), ErrorKind::parameter,
          "source matrix must be square and non-empty");
  require(all_finite(entries_), ErrorKind::parameter, "source matrix has non-finite entries");
  const double defect = hermitian_defect(entries_);
  require(defect <= 1e-12, ErrorKind::parameter,
          "source matrix is not Hermitian (max deviation " + std::to_string(defect) + ")");
  if (is_diagonal()) {
    const RVector diag = entries_.diagonal().real();
    require(diag.minCoeff() >= -1e-12 * std::max(diag.maxCoeff(), 0.0), ErrorKind::parameter,
            "source matrix is not positive semidefinite");
    return;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(entries_), Eigen::EigenvaluesOnly);
  const RVector& ev = eig.eigenvalues();
  require(ev.minCoeff() >= -1e-12 * std::max(ev.maxCoeff(), 0.0), ErrorKind::parameter,
          "source matrix is not positive semidefinite (min eigenvalue " +
              std::to_string(ev.minCoeff()) + ")");
}

bool SourceMatrix::is_diagonal() const {
  for (Index j = 0; j < entries_.cols(); ++j)
    for (Index i = 0; i < entries_.rows(); ++i)
      if (i != j && entries_(i, j) != cdouble(0.0)) return false;
  return true;
}

bool HatanoNelsonParams::stable() const {
  return kappa > 2.0 * std::sqrt(t_right * t_left);
}

double SshParams::t1_right() const { return t1 * std::exp(g); }
double SshParams::t1_left() const { return t1 * std::exp(-g); }
double SshParams::t2_right() const { return t2 * std::exp(g); }
double SshParams::t2_left() const { return t2 * std::exp(-g); }

RelaxationMatrix build_hatano_nelson(const HatanoNelsonParams& params) {
  require(params.n_sites >= 1, ErrorKind::parameter, "n_sites must be >= 1");
  require(params.t_right > 0.0 && params.t_left > 0.0, ErrorKind::parameter,
          "Hatano-Nelson hoppings must be positive");
  require(std::isfinite(params.kappa), ErrorKind::parameter, "kappa must be finite");
  const Index n = params.n_sites;
  CMatrix x = CMatrix::Zero(n, n);
  x.diagonal().setConstant(params.kappa);
  for (Index j = 0; j + 1 < n; ++j) {
    x(j + 1, j) = -params.t_right;
    x(j, j + 1) = -params.t_left;
  }
  return RelaxationMatrix(std::move(x), numeric_labels(params.n_sites));
}

RelaxationMatrix build_ssh(const SshParams& params) {
  require(params.n_cells >= 1, ErrorKind::parameter, "n_cells must be >= 1");
  require(params.t1 > 0.0 && params.t2 > 0.0, ErrorKind::parameter,
          "SSH hoppings t1, t2 must be positive");
  require(std::isfinite(params.g) && std::isfinite(params.kappa), ErrorKind::parameter,
          "g and kappa must be finite");
  const Index n = 2 * static_cast<Index>(params.n_cells);
  CMatrix x = CMatrix::Zero(n, n);
  x.diagonal().setConstant(params.kappa);
  for (int cell = 1; cell <= params.n_cells; ++cell) {
    const Index a = ssh_index(cell, Sublattice::A, params.n_cells) - 1;
    const Index b = a + 1;
    x(b, a) = -params.t1_right();
    x(a, b) = -params.t1_left();
    if (cell < params.n_cells) {
      x(b + 1, b) = -params.t2_right();
      x(b, b + 1) = -params.t2_left();
    }
  }
  return RelaxationMatrix(std::move(x), ssh_labels(params.n_cells));
}

int ssh_index(int cell, Sublattice sublattice, int n_cells) {
  require(cell >= 1 && cell <= n_cells, ErrorKind::index,
          "cell " + std::to_string(cell) + " outside 1.." + std::to_string(n_cells));
  return 2 * (cell - 1) + (sublattice == Sublattice::A ? 1 : 2);
}

SourceMatrix build_local_pump(int dim, int site, double strength) {
  require(dim >= 1, ErrorKind::parameter, "pump dimension must be >= 1");
  require(site >= 1 && site <= dim, ErrorKind::index,
          "pump site " + std::to_string(site) + " outside 1.." + std::to_string(dim));
  require(strength > 0.0 && std::isfinite(strength), ErrorKind::parameter,
          "pump strength must be positive");
  CMatrix y = CMatrix::Zero(dim, dim);
  y(site - 1, site - 1) = strength;
  return SourceMatrix(std::move(y));
}

SourceMatrix build_diagonal_pump(std::span<const double> rates) {
  require(!rates.empty(), ErrorKind::parameter, "diagonal pump needs at least one rate");
  const Index n = static_cast<Index>(rates.size());
  CMatrix y = CMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const double rate = rates[static_cast<std::size_t>(j)];
    require(rate >= 0.0 && std::isfinite(rate), ErrorKind::parameter,
            "pump rate at site " + std::to_string(j + 1) + " is negative");
    y(j, j) = rate;
  }
  return SourceMatrix(std::move(y));
}

}  // namespace skinlock
