#include "skinlock/steady_state.hpp"

#include "skinlock/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace skinlock {

namespace {

// Precision-aware bound: a double representation of C cannot beat
// eps |X| |C| / |Y| however it was computed.
double declared_tolerance(double method_tolerance, const CMatrix& x, const CMatrix& y,
                          const CMatrix& c) {
  const double y_norm = y.norm();
  if (y_norm == 0.0) return method_tolerance;
  return std::max(method_tolerance, 64.0 * kEps * x.norm() * c.norm() / y_norm);
}

SteadyCorrelator finalize(CMatrix c, SolveMethod method, const CMatrix& x, const CMatrix& y,
                          double method_tolerance) {
  SteadyCorrelator out;
  out.method = method;
  out.asymmetry = hermitian_defect(c);
  out.entries = hermitian_part(c);
  out.residual = lyapunov_residual(x, y, out.entries);
  out.residual_tolerance = declared_tolerance(method_tolerance, x, y, out.entries);
  out.time = std::numeric_limits<double>::infinity();
  return out;
}

// Solves T C + C T^dagger = Y for upper-triangular T by back substitution.
CMatrix triangular_lyapunov(const CMatrix& t, const CMatrix& y) {
  const Index n = t.rows();
  CMatrix c = CMatrix::Zero(n, n);
  for (Index i = n - 1; i >= 0; --i) {
    const Index below = n - 1 - i;
    for (Index j = n - 1; j >= 0; --j) {
      const Index right = n - 1 - j;
      cdouble acc = y(i, j);
      if (below > 0) {
        acc -= (t.row(i).segment(i + 1, below) * c.col(j).segment(i + 1, below)).value();
      }
      if (right > 0) {
        acc -= (c.row(i).segment(j + 1, right) * t.row(j).segment(j + 1, right).adjoint()).value();
      }
      c(i, j) = acc / (t(i, i) + std::conj(t(j, j)));
    }
  }
  return c;
}

CMatrix schur_solve(const Eigen::ComplexSchur<CMatrix>& schur, const CMatrix& y) {
  const CMatrix& q = schur.matrixU();
  const CMatrix rotated = q.adjoint() * y * q;
  return q * triangular_lyapunov(schur.matrixT(), rotated) * q.adjoint();
}

CMatrix lyapunov_operator(const CMatrix& x, const CMatrix& c) {
  return x * c + c * x.adjoint();
}

}  // namespace

std::string_view to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::direct: return "direct";
    case SolveMethod::spectral: return "spectral";
    case SolveMethod::integrated: return "integrated";
  }
  return "unknown";
}

double lyapunov_residual(const CMatrix& x, const CMatrix& y, const CMatrix& c) {
  const double absolute = (lyapunov_operator(x, c) - y).norm();
  const double y_norm = y.norm();
  return y_norm == 0.0 ? absolute : absolute / y_norm;
}

void require_stable(const CVector& betas) {
  const double smallest = betas.real().minCoeff();
  if (!(smallest > 0.0)) {
    fail(ErrorKind::stability,
         "relaxation matrix has an eigenvalue with Re beta = " + std::to_string(smallest) +
             " <= 0; no steady state exists");
  }
}

SteadyCorrelator solve_lyapunov_direct(const RelaxationMatrix& x, const SourceMatrix& y,
                                       DirectRoute route) {
  require(x.dim() == y.dim(), ErrorKind::parameter, "X and Y dimensions differ");
  const CMatrix& xm = x.entries();
  const CMatrix& ym = y.entries();
  const Index n = x.dim();

  Eigen::ComplexSchur<CMatrix> schur(xm);
  require(schur.info() == Eigen::Success, ErrorKind::solve, "Schur decomposition failed");
  require_stable(schur.matrixT().diagonal());

  CMatrix c;
  if (route == DirectRoute::vectorized) {
    // Column-major vec: vec(XC) = (I kron X) vec(C), vec(C X^dagger) = (conj(X) kron I) vec(C).
    const Index nn = n * n;
    CMatrix k = CMatrix::Zero(nn, nn);
    for (Index b = 0; b < n; ++b) {
      k.block(b * n, b * n, n, n) += xm;
      for (Index a = 0; a < n; ++a) {
        const cdouble coeff = std::conj(xm(b, a));
        if (coeff == cdouble(0.0)) continue;
        k.block(b * n, a * n, n, n).diagonal().array() += coeff;
      }
    }
    Eigen::PartialPivLU<CMatrix> lu(k);
    const CVector rhs = Eigen::Map<const CVector>(ym.data(), nn);
    CVector sol = lu.solve(rhs);
    sol += lu.solve(rhs - k * sol);
    require(sol.allFinite(), ErrorKind::solve, "vectorized Lyapunov system is singular");
    c = Eigen::Map<const CMatrix>(sol.data(), n, n);
  } else {
    c = schur_solve(schur, ym);
    for (int sweep = 0; sweep < 2; ++sweep) {
      const CMatrix correction = schur_solve(schur, ym - lyapunov_operator(xm, c));
      const CMatrix candidate = c + correction;
      if (lyapunov_residual(xm, ym, candidate) >= lyapunov_residual(xm, ym, c)) break;
      c = candidate;
    }
    require(c.allFinite(), ErrorKind::solve, "Schur Lyapunov solve produced non-finite values");
  }
  return finalize(std::move(c), SolveMethod::direct, xm, ym, kDirectTolerance);
}

SteadyCorrelator solve_lyapunov_spectral(const BiorthogonalSpectrum& spectrum,
                                         const SourceMatrix& y) {
  require(spectrum.dim() == y.dim(), ErrorKind::parameter, "spectrum and Y dimensions differ");
  require_stable(spectrum.betas);
  const Index n = spectrum.dim();
  CMatrix kernel = spectrum.left.adjoint() * y.entries() * spectrum.left;
  for (Index m = 0; m < n; ++m) {
    for (Index k = 0; k < n; ++k) {
      kernel(m, k) /= spectrum.betas(m) + std::conj(spectrum.betas(k));
    }
  }
  CMatrix c = spectrum.right * kernel * spectrum.right.adjoint();
  require(c.allFinite(), ErrorKind::solve, "spectral sum produced non-finite values");
  // The spectral route has no independent backward-stability guarantee; its
  // accuracy is governed by the eigenvector conditioning.
  const double tolerance = std::max(1e-10, 1e-8 * spectrum.condition_estimate * kEps);
  return finalize(std::move(c), SolveMethod::spectral, spectrum.reconstruct(), y.entries(),
                  tolerance);
}

SingleModeApproximation single_mode_approximation(const BiorthogonalSpectrum& spectrum, int site,
                                                  double strength) {
  require(site >= 1 && site <= spectrum.dim(), ErrorKind::index,
          "pump site " + std::to_string(site) + " outside 1.." + std::to_string(spectrum.dim()));
  require(strength > 0.0, ErrorKind::parameter, "pump strength must be positive");
  require_stable(spectrum.betas);

  SingleModeApproximation out;
  out.slow_mode = slowest_mode(spectrum);
  const CVector left = spectrum.left_mode(out.slow_mode);
  const CVector right = spectrum.right_mode(out.slow_mode);
  const double left_at_site = std::abs(left(site - 1));
  if (left_at_site <= 1e-14 * left.cwiseAbs().maxCoeff()) {
    fail(ErrorKind::dark_source, "slow mode has no weight at pump site " + std::to_string(site));
  }
  const double re_beta = spectrum.betas(out.slow_mode - 1).real();
  out.loading = strength * left_at_site * left_at_site / (2.0 * re_beta);
  out.predicted_nu_max = out.loading * right.squaredNorm();

  const CMatrix rank1 = out.loading * right * right.adjoint();
  CMatrix y = CMatrix::Zero(spectrum.dim(), spectrum.dim());
  y(site - 1, site - 1) = strength;
  out.rank1 = finalize(rank1, SolveMethod::spectral, spectrum.reconstruct(), y, 0.0);
  // An approximation: the residual is informative only.
  out.rank1.residual_tolerance = std::numeric_limits<double>::infinity();
  return out;
}

std::vector<SteadyCorrelator> propagate_correlator(const RelaxationMatrix& x,
                                                   const SourceMatrix& y, const CMatrix& c0,
                                                   const PropagationOptions& options) {
  const CMatrix& xm = x.entries();
  const CMatrix& ym = y.entries();
  const Index n = x.dim();
  require(y.dim() == n && c0.rows() == n && c0.cols() == n, ErrorKind::parameter,
          "X, Y and C0 dimensions differ");
  require(hermitian_defect(c0) <= 1e-12 * std::max(1.0, max_abs(c0)), ErrorKind::parameter,
          "initial correlator is not Hermitian");
  require(options.t_final >= 0.0 && options.stride >= 1, ErrorKind::parameter,
          "t_final must be >= 0 and stride >= 1");

  // Gershgorin bound on max |beta|.
  double radius = 0.0;
  for (Index i = 0; i < n; ++i) radius = std::max(radius, xm.row(i).cwiseAbs().sum());
  radius = std::max(radius, std::numeric_limits<double>::min());

  double dt = options.dt > 0.0 ? options.dt : 0.01 / radius;
  // The Lyapunov generator has eigenvalues -(beta_m + conj beta_n), |.| <= 2 radius.
  if (dt * 2.0 * radius > 2.5) {
    fail(ErrorKind::step_size, "dt = " + std::to_string(dt) +
                                   " exceeds the RK4 stability bound 1.25 / max|beta| = " +
                                   std::to_string(1.25 / radius));
  }
  const long steps =
      options.t_final == 0.0 ? 0 : static_cast<long>(std::ceil(options.t_final / dt - 1e-9));
  if (steps > 0) dt = options.t_final / static_cast<double>(steps);

  const auto rhs = [&](const CMatrix& c) -> CMatrix { return ym - xm * c - c * xm.adjoint(); };
  const auto snapshot = [&](const CMatrix& c, double t) {
    SteadyCorrelator s;
    s.entries = c;
    s.method = SolveMethod::integrated;
    s.residual = std::numeric_limits<double>::quiet_NaN();
    s.residual_tolerance = std::numeric_limits<double>::quiet_NaN();
    s.time = t;
    return s;
  };

  std::vector<SteadyCorrelator> trajectory;
  CMatrix c = hermitian_part(c0);
  trajectory.push_back(snapshot(c, 0.0));
  for (long step = 1; step <= steps; ++step) {
    const CMatrix k1 = rhs(c);
    const CMatrix k2 = rhs(c + 0.5 * dt * k1);
    const CMatrix k3 = rhs(c + 0.5 * dt * k2);
    const CMatrix k4 = rhs(c + dt * k3);
    const CMatrix next = c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double asymmetry = hermitian_defect(next);
    c = hermitian_part(next);
    if (!c.allFinite()) {
      fail(ErrorKind::step_size, "integration diverged at step " + std::to_string(step));
    }
    if (step % options.stride == 0 || step == steps) {
      trajectory.push_back(snapshot(c, static_cast<double>(step) * dt));
      trajectory.back().asymmetry = asymmetry;
    }
  }
  return trajectory;
}

CMatrix closed_form_correlator(const BiorthogonalSpectrum& spectrum, const SourceMatrix& y,
                               const CMatrix& c0, double t) {
  const Index n = spectrum.dim();
  require(y.dim() == n && c0.rows() == n && c0.cols() == n, ErrorKind::parameter,
          "spectrum, Y and C0 dimensions differ");
  require(t >= 0.0, ErrorKind::parameter, "time must be non-negative");
  require_stable(spectrum.betas);
  if (t == 0.0) return c0;

  const CMatrix initial = spectrum.left.adjoint() * c0 * spectrum.left;
  const CMatrix source = spectrum.left.adjoint() * y.entries() * spectrum.left;
  CMatrix kernel(n, n);
  for (Index m = 0; m < n; ++m) {
    for (Index k = 0; k < n; ++k) {
      const cdouble z = spectrum.betas(m) + std::conj(spectrum.betas(k));
      const cdouble zt = z * t;
      const cdouble decay = std::exp(-zt);
      // (1 - e^{-zt}) / z without cancellation for small |zt|.
      const cdouble accumulated =
          std::abs(zt) < 1e-4 ? t * (1.0 - zt / 2.0 + zt * zt / 6.0 - zt * zt * zt / 24.0)
                              : (1.0 - decay) / z;
      kernel(m, k) = decay * initial(m, k) + accumulated * source(m, k);
    }
  }
  return hermitian_part(spectrum.right * kernel * spectrum.right.adjoint());
}

}  // namespace skinlock
