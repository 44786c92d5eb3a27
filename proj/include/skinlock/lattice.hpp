#pragma once

#include "skinlock/linalg.hpp"

#include <span>
#include <string>
#include <vector>

namespace skinlock {

/// Dense non-Hermitian one-body matrix X governing the decay of the
/// correlation matrix, together with its site labels.
class RelaxationMatrix {
public:
  RelaxationMatrix(CMatrix entries, std::vector<std::string> labels);
  /// Labels default to "1".."dim".
  explicit RelaxationMatrix(CMatrix entries);

  Index dim() const { return entries_.rows(); }
  const CMatrix& entries() const { return entries_; }
  const std::vector<std::string>& labels() const { return labels_; }

private:
  CMatrix entries_;
  std::vector<std::string> labels_;
};

/// Hermitian positive-semidefinite pump matrix Y.
class SourceMatrix {
public:
  explicit SourceMatrix(CMatrix entries);

  Index dim() const { return entries_.rows(); }
  const CMatrix& entries() const { return entries_; }
  bool is_diagonal() const;

private:
  CMatrix entries_;
};

struct HatanoNelsonParams {
  int n_sites = 40;
  double t_right = 1.0;
  double t_left = 0.17;
  double kappa = 0.91;

  /// kappa > 2 sqrt(t_R t_L) puts every eigenvalue in the right half plane.
  bool stable() const;
};

struct SshParams {
  int n_cells = 20;
  double t1 = 0.5;
  double t2 = 1.0;
  double g = 0.0;
  double kappa = 1.5;

  double t1_right() const;
  double t1_left() const;
  double t2_right() const;
  double t2_left() const;
};

enum class Sublattice { A, B };

RelaxationMatrix build_hatano_nelson(const HatanoNelsonParams& params);
RelaxationMatrix build_ssh(const SshParams& params);

/// 1-based flattened index of (cell, sublattice) in the interleaved
/// 1A,1B,2A,2B,... basis.
int ssh_index(int cell, Sublattice sublattice, int n_cells);

/// Y = strength |s><s| with 1-based site s.
SourceMatrix build_local_pump(int dim, int site, double strength);
SourceMatrix build_diagonal_pump(std::span<const double> rates);

std::vector<std::string> numeric_labels(int dim);
std::vector<std::string> ssh_labels(int n_cells);

}  // namespace skinlock
