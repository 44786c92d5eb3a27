#pragma once

#include "skinlock/lattice.hpp"
#include "skinlock/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace skinlock {

enum class JumpKind { bond, onsite, pump };

std::string_view to_string(JumpKind kind);

/// One linear jump operator: loss jumps are sum_j conj(u_j) c_j and gain
/// jumps sum_j v_j c_j^dagger, so that the Gram matrices are sum u u^dagger
/// and sum v v^dagger in the C_ij = Tr(rho c_j^dagger c_i) convention.
struct Jump {
  JumpKind kind = JumpKind::onsite;
  std::string label;  ///< e.g. "bond(3)", "bond2(4)", "onsite(1A)", "pump(7)"
  CVector coefficients;
};

struct JumpSet {
  Index dim = 0;
  std::vector<Jump> losses;
  std::vector<Jump> gains;

  CMatrix loss_gram() const;
  CMatrix gain_gram() const;
};

struct MicroscopicRealization {
  CMatrix hamiltonian;  ///< h = (X - X^dagger) / 2i
  CMatrix gain_gram;    ///< Gamma+ = Y
  CMatrix loss_gram;    ///< Gamma- = X + X^dagger - Y
  double loss_min_eigenvalue = 0.0;
  bool physical = true;  ///< loss_min_eigenvalue >= -1e-10
  std::optional<JumpSet> jumps;

  /// i h + (Gamma- + Gamma+) / 2.
  CMatrix relaxation() const;
};

MicroscopicRealization inverse_design(const CMatrix& x_target, const CMatrix& y_target);
MicroscopicRealization inverse_design(const RelaxationMatrix& x, const SourceMatrix& y);

/// Bond losses sqrt(t_R + t_L)(c_j - c_{j+1}), residual onsite losses and
/// sqrt(y_j) gains for Y = diag(y). Throws InfeasibilityError if any onsite
/// weight 2 kappa - y_j - (bond load at j) is negative.
JumpSet hn_jump_decomposition(const HatanoNelsonParams& params, std::span<const double> pump);
/// Uniform pump y_j = gamma.
JumpSet hn_jump_decomposition(const HatanoNelsonParams& params, double gamma);

/// Intracell bonds sqrt(beta_1)(c_nA - c_nB), intercell bonds
/// sqrt(beta_2)(c_nB - c_{n+1,A}), residual onsite losses and gains.
JumpSet ssh_jump_decomposition(const SshParams& params, std::span<const double> pump);
JumpSet ssh_jump_decomposition(const SshParams& params, double gamma);

struct JumpValidation {
  double loss_gram_error = 0.0;
  double gain_gram_error = 0.0;
  double relaxation_error = 0.0;  ///< rebuilt X vs target
  double source_error = 0.0;      ///< rebuilt Y vs target
  double loss_min_eigenvalue = 0.0;
  bool passed = false;
};

/// Recomputes both Gram matrices and (X, Y) and compares to `realization`.
/// Throws a validation error naming the worst entry and the jumps touching
/// it when any deviation exceeds `tolerance`.
JumpValidation validate_jump_set(const JumpSet& jumps, const MicroscopicRealization& realization,
                                 const CMatrix& x_target, const CMatrix& y_target,
                                 double tolerance = 1e-12);

}  // namespace skinlock
