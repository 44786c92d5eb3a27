#include "skinlock/inverse_design.hpp"

#include "skinlock/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace skinlock {

namespace {

CVector unit(Index dim, Index site) {
  CVector v = CVector::Zero(dim);
  v(site) = 1.0;
  return v;
}

CMatrix gram(const std::vector<Jump>& jumps, Index dim) {
  CMatrix g = CMatrix::Zero(dim, dim);
  for (const auto& jump : jumps) g += jump.coefficients * jump.coefficients.adjoint();
  return g;
}

double min_eigenvalue(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(m), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

// Onsite weights 2 kappa - y_j - load_j. Weights that are negative only at
// roundoff level are clamped to zero; anything beyond aborts with a per-site
// deficit report.
std::vector<double> onsite_weights(double kappa, std::span<const double> pump,
                                   const std::vector<double>& load,
                                   const std::vector<std::string>& labels) {
  std::vector<double> weights(load.size());
  std::ostringstream report;
  double worst = 0.0;
  std::string worst_site;
  for (std::size_t j = 0; j < load.size(); ++j) {
    const double w = 2.0 * kappa - pump[j] - load[j];
    const double roundoff = 8.0 * kEps * (2.0 * std::abs(kappa) + pump[j] + load[j]);
    if (w >= 0.0) {
      weights[j] = w;
    } else if (w >= -roundoff) {
      weights[j] = 0.0;
    } else {
      report << " site " << labels[j] << ": deficit " << -w << ";";
      if (-w > worst) {
        worst = -w;
        worst_site = labels[j];
      }
    }
  }
  if (worst > 0.0) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "residual onsite loss would be negative (max deficit " << worst << " at site "
        << worst_site << ");" << report.str();
    throw InfeasibilityError(msg.str(), worst, worst_site);
  }
  return weights;
}

void add_onsite_and_gains(JumpSet& set, const std::vector<double>& weights,
                          std::span<const double> pump, const std::vector<std::string>& labels) {
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const Index site = static_cast<Index>(j);
    set.losses.push_back({JumpKind::onsite, "onsite(" + labels[j] + ")",
                          std::sqrt(weights[j]) * unit(set.dim, site)});
  }
  for (std::size_t j = 0; j < pump.size(); ++j) {
    if (pump[j] <= 0.0) continue;
    const Index site = static_cast<Index>(j);
    set.gains.push_back(
        {JumpKind::pump, "pump(" + labels[j] + ")", std::sqrt(pump[j]) * unit(set.dim, site)});
  }
}

void check_pump(std::span<const double> pump, std::size_t dim) {
  require(pump.size() == dim, ErrorKind::parameter,
          "pump has " + std::to_string(pump.size()) + " rates, expected " + std::to_string(dim));
  for (std::size_t j = 0; j < dim; ++j) {
    require(pump[j] >= 0.0 && std::isfinite(pump[j]), ErrorKind::parameter,
            "pump rate at site " + std::to_string(j + 1) + " is negative");
  }
}

}  // namespace

std::string_view to_string(JumpKind kind) {
  switch (kind) {
    case JumpKind::bond: return "bond";
    case JumpKind::onsite: return "onsite";
    case JumpKind::pump: return "pump";
  }
  return "unknown";
}

CMatrix JumpSet::loss_gram() const { return gram(losses, dim); }
CMatrix JumpSet::gain_gram() const { return gram(gains, dim); }

CMatrix MicroscopicRealization::relaxation() const {
  return cdouble(0.0, 1.0) * hamiltonian + 0.5 * (loss_gram + gain_gram);
}

MicroscopicRealization inverse_design(const CMatrix& x_target, const CMatrix& y_target) {
  require(x_target.rows() == x_target.cols() && y_target.rows() == y_target.cols() &&
              x_target.rows() == y_target.rows() && x_target.rows() > 0,
          ErrorKind::parameter, "X and Y must be square with equal dimensions");
  require(hermitian_defect(y_target) <= 1e-12 * std::max(1.0, max_abs(y_target)),
          ErrorKind::parameter, "target source matrix is not Hermitian");
  const double y_min = min_eigenvalue(y_target);
  require(y_min >= -1e-12 * std::max(1.0, max_abs(y_target)), ErrorKind::parameter,
          "target source matrix is not positive semidefinite");

  MicroscopicRealization out;
  out.hamiltonian = (x_target - x_target.adjoint()) / cdouble(0.0, 2.0);
  out.gain_gram = y_target;
  out.loss_gram = x_target + x_target.adjoint() - y_target;
  out.loss_min_eigenvalue = min_eigenvalue(out.loss_gram);
  out.physical = out.loss_min_eigenvalue >= -1e-10;
  return out;
}

MicroscopicRealization inverse_design(const RelaxationMatrix& x, const SourceMatrix& y) {
  return inverse_design(x.entries(), y.entries());
}

JumpSet hn_jump_decomposition(const HatanoNelsonParams& params, std::span<const double> pump) {
  require(params.n_sites >= 1, ErrorKind::parameter, "n_sites must be >= 1");
  require(params.t_right >= 0.0 && params.t_left >= 0.0, ErrorKind::parameter,
          "hoppings must be non-negative");
  const std::size_t n = static_cast<std::size_t>(params.n_sites);
  check_pump(pump, n);
  const double beta = params.t_right + params.t_left;
  const auto labels = numeric_labels(params.n_sites);

  std::vector<double> load(n, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    load[j] += beta;
    load[j + 1] += beta;
  }
  const auto weights = onsite_weights(params.kappa, pump, load, labels);

  JumpSet set;
  set.dim = params.n_sites;
  if (beta > 0.0) {
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const Index site = static_cast<Index>(j);
      set.losses.push_back({JumpKind::bond, "bond(" + labels[j] + ")",
                            std::sqrt(beta) * (unit(set.dim, site) - unit(set.dim, site + 1))});
    }
  }
  add_onsite_and_gains(set, weights, pump, labels);
  return set;
}

JumpSet hn_jump_decomposition(const HatanoNelsonParams& params, double gamma) {
  require(gamma > 0.0, ErrorKind::parameter, "uniform pump gamma must be positive");
  require(params.n_sites >= 1, ErrorKind::parameter, "n_sites must be >= 1");
  const std::vector<double> pump(static_cast<std::size_t>(params.n_sites), gamma);
  return hn_jump_decomposition(params, pump);
}

JumpSet ssh_jump_decomposition(const SshParams& params, std::span<const double> pump) {
  require(params.n_cells >= 1, ErrorKind::parameter, "n_cells must be >= 1");
  require(params.t1 > 0.0 && params.t2 > 0.0, ErrorKind::parameter, "SSH hoppings must be positive");
  const std::size_t n = 2 * static_cast<std::size_t>(params.n_cells);
  check_pump(pump, n);
  const double beta1 = params.t1_right() + params.t1_left();
  const double beta2 = params.t2_right() + params.t2_left();
  const auto labels = ssh_labels(params.n_cells);

  std::vector<double> load(n, beta1);
  for (int cell = 1; cell < params.n_cells; ++cell) {
    const auto b = static_cast<std::size_t>(ssh_index(cell, Sublattice::B, params.n_cells) - 1);
    load[b] += beta2;
    load[b + 1] += beta2;
  }
  const auto weights = onsite_weights(params.kappa, pump, load, labels);

  JumpSet set;
  set.dim = static_cast<Index>(n);
  for (int cell = 1; cell <= params.n_cells; ++cell) {
    const Index a = ssh_index(cell, Sublattice::A, params.n_cells) - 1;
    set.losses.push_back({JumpKind::bond, "bond1(" + std::to_string(cell) + ")",
                          std::sqrt(beta1) * (unit(set.dim, a) - unit(set.dim, a + 1))});
  }
  for (int cell = 1; cell < params.n_cells; ++cell) {
    const Index b = ssh_index(cell, Sublattice::B, params.n_cells) - 1;
    set.losses.push_back({JumpKind::bond, "bond2(" + std::to_string(cell) + ")",
                          std::sqrt(beta2) * (unit(set.dim, b) - unit(set.dim, b + 1))});
  }
  add_onsite_and_gains(set, weights, pump, labels);
  return set;
}

JumpSet ssh_jump_decomposition(const SshParams& params, double gamma) {
  require(gamma > 0.0, ErrorKind::parameter, "uniform pump gamma must be positive");
  require(params.n_cells >= 1, ErrorKind::parameter, "n_cells must be >= 1");
  const std::vector<double> pump(2 * static_cast<std::size_t>(params.n_cells), gamma);
  return ssh_jump_decomposition(params, pump);
}

JumpValidation validate_jump_set(const JumpSet& jumps, const MicroscopicRealization& realization,
                                 const CMatrix& x_target, const CMatrix& y_target,
                                 double tolerance) {
  const Index n = jumps.dim;
  require(realization.loss_gram.rows() == n && x_target.rows() == n && y_target.rows() == n,
          ErrorKind::parameter, "jump set and realization dimensions differ");

  const CMatrix loss = jumps.loss_gram();
  const CMatrix gain = jumps.gain_gram();
  MicroscopicRealization rebuilt = realization;
  rebuilt.loss_gram = loss;
  rebuilt.gain_gram = gain;

  struct Check {
    const char* name;
    CMatrix deviation;
    const std::vector<Jump>* suspects;
  };
  const Check checks[] = {
      {"loss Gram", loss - realization.loss_gram, &jumps.losses},
      {"gain Gram", gain - realization.gain_gram, &jumps.gains},
      {"relaxation matrix", rebuilt.relaxation() - x_target, &jumps.losses},
      {"source matrix", gain - y_target, &jumps.gains},
  };

  JumpValidation out;
  out.loss_gram_error = max_abs(checks[0].deviation);
  out.gain_gram_error = max_abs(checks[1].deviation);
  out.relaxation_error = max_abs(checks[2].deviation);
  out.source_error = max_abs(checks[3].deviation);
  out.loss_min_eigenvalue = min_eigenvalue(loss);

  for (const auto& check : checks) {
    Index i = 0, j = 0;
    if (check.deviation.size() == 0) continue;
    const double worst = check.deviation.cwiseAbs().maxCoeff(&i, &j);
    if (worst <= tolerance) continue;
    std::ostringstream msg;
    msg.precision(6);
    msg << check.name << " mismatch " << worst << " at entry (" << i + 1 << ", " << j + 1 << ")";
    std::string touching;
    for (const auto& jump : *check.suspects) {
      if (jump.coefficients(i) != cdouble(0.0) && jump.coefficients(j) != cdouble(0.0)) {
        touching += (touching.empty() ? "" : ", ") + jump.label;
      }
    }
    if (!touching.empty()) msg << "; jumps touching it: " << touching;
    fail(ErrorKind::validation, msg.str());
  }
  out.passed = true;
  return out;
}

}  // namespace skinlock
