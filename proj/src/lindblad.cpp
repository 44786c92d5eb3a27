#include "skinlock/lindblad.hpp"

#include "skinlock/errors.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>

namespace skinlock {

namespace {

void require_sites(int n_sites) {
  require(n_sites >= 1, ErrorKind::parameter, "need at least one site");
  require(n_sites <= FockOperatorSet::kMaxSites, ErrorKind::scale,
          "many-body oracle is capped at " + std::to_string(FockOperatorSet::kMaxSites) +
              " sites, got " + std::to_string(n_sites));
}

int sites_for_dim(Index dim) {
  int n = 0;
  while ((Index{1} << n) < dim) ++n;
  require((Index{1} << n) == dim, ErrorKind::parameter, "density matrix dimension is not 2^N");
  return n;
}

}  // namespace

FockOperatorSet::FockOperatorSet(int n_sites) : n_sites_(n_sites) {
  require_sites(n_sites);
  const Index dim = hilbert_dim();
  for (int j = 0; j < n_sites; ++j) {
    CMatrix c = CMatrix::Zero(dim, dim);
    const unsigned mask = 1u << j;
    for (Index b = 0; b < dim; ++b) {
      const auto state = static_cast<unsigned>(b);
      if ((state & mask) == 0) continue;
      const int parity = std::popcount(state & (mask - 1));
      c(static_cast<Index>(state ^ mask), b) = parity % 2 == 0 ? 1.0 : -1.0;
    }
    numbers_.push_back(c.adjoint() * c);
    annihilators_.push_back(std::move(c));
  }
  const double error = anticommutation_error();
  require(error <= 1e-14, ErrorKind::decomposition,
          "Jordan-Wigner operators violate anticommutation by " + std::to_string(error));
}

const CMatrix& FockOperatorSet::annihilator(int site) const {
  require(site >= 1 && site <= n_sites_, ErrorKind::index, "site out of range");
  return annihilators_[static_cast<std::size_t>(site - 1)];
}

const CMatrix& FockOperatorSet::number(int site) const {
  require(site >= 1 && site <= n_sites_, ErrorKind::index, "site out of range");
  return numbers_[static_cast<std::size_t>(site - 1)];
}

double FockOperatorSet::anticommutation_error() const {
  const Index dim = hilbert_dim();
  const CMatrix identity = CMatrix::Identity(dim, dim);
  double worst = 0.0;
  for (int i = 0; i < n_sites_; ++i) {
    for (int j = 0; j < n_sites_; ++j) {
      const CMatrix& ci = annihilators_[static_cast<std::size_t>(i)];
      const CMatrix& cj = annihilators_[static_cast<std::size_t>(j)];
      const CMatrix mixed = ci * cj.adjoint() + cj.adjoint() * ci - (i == j ? identity : CMatrix::Zero(dim, dim));
      worst = std::max(worst, max_abs(mixed));
      worst = std::max(worst, max_abs(ci * cj + cj * ci));
    }
  }
  return worst;
}

CMatrix FockOperatorSet::vacuum() const {
  CMatrix rho = CMatrix::Zero(hilbert_dim(), hilbert_dim());
  rho(0, 0) = 1.0;
  return rho;
}

CMatrix FockOperatorSet::filled() const {
  CMatrix rho = CMatrix::Zero(hilbert_dim(), hilbert_dim());
  rho(hilbert_dim() - 1, hilbert_dim() - 1) = 1.0;
  return rho;
}

CMatrix FockOperatorSet::single_particle(int site) const {
  const CMatrix up = creator(site);
  return up * vacuum() * up.adjoint();
}

DensityMatrixHealth check_density_matrix(const CMatrix& rho) {
  DensityMatrixHealth health;
  health.hermitian_defect = hermitian_defect(rho);
  health.trace_error = std::abs(rho.trace() - cdouble(1.0));
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(rho), Eigen::EigenvaluesOnly);
  health.min_eigenvalue = eig.eigenvalues().minCoeff();
  return health;
}

LindbladGenerator::LindbladGenerator(const FockOperatorSet& ops, const CMatrix& h,
                                     const JumpSet& jumps) {
  const int n = ops.n_sites();
  require(h.rows() == n && h.cols() == n && jumps.dim == n, ErrorKind::parameter,
          "Hamiltonian, jump set and operator set dimensions differ");
  require(hermitian_defect(h) <= 1e-12 * std::max(1.0, max_abs(h)), ErrorKind::parameter,
          "one-body Hamiltonian is not Hermitian");
  const Index dim = ops.hilbert_dim();

  CMatrix hamiltonian = CMatrix::Zero(dim, dim);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (h(i - 1, j - 1) != cdouble(0.0))
        hamiltonian += h(i - 1, j - 1) * ops.creator(i) * ops.annihilator(j);

  CMatrix decay = CMatrix::Zero(dim, dim);
  for (const auto& jump : jumps.losses) {
    CMatrix op = CMatrix::Zero(dim, dim);
    for (int j = 1; j <= n; ++j) op += std::conj(jump.coefficients(j - 1)) * ops.annihilator(j);
    decay += op.adjoint() * op;
    jumps_.push_back(std::move(op));
  }
  for (const auto& jump : jumps.gains) {
    CMatrix op = CMatrix::Zero(dim, dim);
    for (int j = 1; j <= n; ++j) op += jump.coefficients(j - 1) * ops.creator(j);
    decay += op.adjoint() * op;
    jumps_.push_back(std::move(op));
  }
  effective_ = hamiltonian - cdouble(0.0, 0.5) * decay;

  Eigen::SelfAdjointEigenSolver<CMatrix> h_eig(hamiltonian, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<CMatrix> k_eig(decay, Eigen::EigenvaluesOnly);
  rate_bound_ = 2.0 * h_eig.eigenvalues().cwiseAbs().maxCoeff() +
                2.0 * k_eig.eigenvalues().cwiseAbs().maxCoeff();
}

CMatrix LindbladGenerator::apply(const CMatrix& rho) const {
  const CMatrix left = effective_ * rho;
  CMatrix out = cdouble(0.0, -1.0) * (left - left.adjoint());
  for (const auto& op : jumps_) out += op * rho * op.adjoint();
  return out;
}

MasterTrajectory evolve_master(const CMatrix& rho0, const CMatrix& h, const JumpSet& jumps,
                               const MasterOptions& options) {
  const int n = sites_for_dim(rho0.rows());
  require_sites(n);
  require(options.dt > 0.0 && options.t_final >= 0.0 && options.stride >= 1, ErrorKind::parameter,
          "dt must be positive, t_final non-negative, stride >= 1");
  const FockOperatorSet ops(n);
  const LindbladGenerator generator(ops, h, jumps);

  const long steps = static_cast<long>(std::ceil(options.t_final / options.dt - 1e-9));
  const double dt = steps > 0 ? options.t_final / static_cast<double>(steps) : options.dt;
  const cdouble initial_trace = rho0.trace();

  MasterTrajectory out;
  CMatrix rho = rho0;
  out.snapshots.push_back({0.0, rho});
  for (long step = 1; step <= steps; ++step) {
    const CMatrix k1 = generator.apply(rho);
    const CMatrix k2 = generator.apply(rho + 0.5 * dt * k1);
    const CMatrix k3 = generator.apply(rho + 0.5 * dt * k2);
    const CMatrix k4 = generator.apply(rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double drift = std::abs(rho.trace() - initial_trace);
    out.max_trace_drift = std::max(out.max_trace_drift, drift);
    if (drift > 1e-6 || !rho.allFinite()) {
      fail(ErrorKind::step_size, "trace drift " + std::to_string(drift) + " at t = " +
                                     std::to_string(static_cast<double>(step) * dt));
    }
    if (step % options.stride == 0 || step == steps) {
      out.snapshots.push_back({static_cast<double>(step) * dt, rho});
    }
  }
  return out;
}

CMatrix correlator_of(const CMatrix& rho, const FockOperatorSet& ops) {
  const int n = ops.n_sites();
  require(rho.rows() == ops.hilbert_dim(), ErrorKind::parameter,
          "density matrix does not match the operator set");
  CMatrix c(n, n);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      c(i - 1, j - 1) = (rho * ops.creator(j) * ops.annihilator(i)).trace();
  return hermitian_part(c);
}

CMatrix correlator_of(const CMatrix& rho) {
  return correlator_of(rho, FockOperatorSet(sites_for_dim(rho.rows())));
}

SteadyOracleResult steady_state_oracle(const CMatrix& h, const JumpSet& jumps,
                                       const SteadyOracleOptions& options) {
  const int n = static_cast<int>(jumps.dim);
  require_sites(n);
  const FockOperatorSet ops(n);
  const LindbladGenerator generator(ops, h, jumps);

  const CMatrix x = cdouble(0.0, 1.0) * h + 0.5 * (jumps.loss_gram() + jumps.gain_gram());
  Eigen::ComplexEigenSolver<CMatrix> eig(x, false);
  const double slowest = eig.eigenvalues().real().minCoeff();
  require(slowest > 0.0, ErrorKind::stability, "relaxation matrix of the realization is not stable");

  const double dt = options.dt > 0.0 ? options.dt : std::min(0.05, 0.5 / std::max(generator.rate_bound(), 1e-12));
  const double budget = options.budget / slowest;

  SteadyOracleResult out;
  out.rho = ops.vacuum();
  double t = 0.0;
  while (true) {
    const CMatrix k1 = generator.apply(out.rho);
    out.derivative_norm = max_abs(k1);
    out.time = t;
    if (out.derivative_norm < options.derivative_tolerance) return out;
    if (t > budget) {
      fail(ErrorKind::convergence, "master equation did not reach |d rho/dt| < " +
                                       std::to_string(options.derivative_tolerance) +
                                       " within t = " + std::to_string(budget));
    }
    const CMatrix k2 = generator.apply(out.rho + 0.5 * dt * k1);
    const CMatrix k3 = generator.apply(out.rho + 0.5 * dt * k2);
    const CMatrix k4 = generator.apply(out.rho + dt * k3);
    out.rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.rho = hermitian_part(out.rho);
    t += dt;
  }
}

}  // namespace skinlock
