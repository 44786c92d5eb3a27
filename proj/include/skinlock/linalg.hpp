#pragma once

#include <Eigen/Dense>

#include <complex>

namespace skinlock {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

constexpr double kEps = 2.220446049250313e-16;

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Largest element of |M - M^dagger|.
inline double hermitian_defect(const CMatrix& m) {
  return max_abs(m - m.adjoint());
}

inline CMatrix hermitian_part(const CMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

inline bool all_finite(const CMatrix& m) {
  return m.allFinite();
}

}  // namespace skinlock
