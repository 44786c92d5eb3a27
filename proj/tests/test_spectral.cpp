#include "skinlock/spectral.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <cmath>
#include <numbers>

using namespace skinlock;

namespace {

double hn_beta(const HatanoNelsonParams& p, int n) {
  return p.kappa - 2.0 * std::sqrt(p.t_right * p.t_left) *
                       std::cos(std::numbers::pi * n / (p.n_sites + 1.0));
}

double unit_overlap(const CVector& a, const CVector& b) {
  return std::norm(a.normalized().dot(b.normalized()));
}

}  // namespace

TEST_CASE("decompose a single site") {
  CMatrix x(1, 1);
  x(0, 0) = 0.7;
  const auto s = biorthogonal_decompose(RelaxationMatrix(x));
  CHECK(s.betas(0) == cdouble(0.7));
  CHECK(std::abs(s.right(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(s.left.adjoint().row(0).dot(s.right.col(0).conjugate()) - 1.0) < 1e-15);
  CHECK((s.left.adjoint() * s.right)(0, 0) == cdouble(1.0));
}

TEST_CASE("Hermitian input: real betas and left equals right") {
  const auto x = build_hatano_nelson({7, 0.6, 0.6, 2.0});
  const auto s = biorthogonal_decompose(x);
  CHECK(s.betas.imag().cwiseAbs().maxCoeff() < 1e-14);
  CHECK(max_abs(s.left - s.right) < 1e-12);
  CHECK(s.condition_estimate == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("numeric HN betas match the cosine band at N = 8") {
  const HatanoNelsonParams p{8, 1.0, 0.17, 0.91};
  const auto s = biorthogonal_decompose(build_hatano_nelson(p));
  for (int n = 1; n <= 8; ++n) {
    CHECK(std::abs(s.betas(n - 1) - cdouble(hn_beta(p, n))) < 1e-10);
  }
  const auto health = check_spectrum(s, build_hatano_nelson(p).entries());
  CHECK(health.ok());
}

TEST_CASE("two-site HN closed form against a quadratic-formula eigensolve") {
  const HatanoNelsonParams p{2, 1.0, 0.17, 0.91};
  const auto s = hn_analytic_spectrum(p);
  const auto e = oracle::eig2(0.91, -0.17, -1.0, 0.91);
  CHECK(std::abs(s.betas(0) - e[0]) < 1e-14);
  CHECK(std::abs(s.betas(1) - e[1]) < 1e-14);
  CHECK(s.betas(0).real() == doctest::Approx(0.91 - std::sqrt(0.17)).epsilon(1e-15));
}

TEST_CASE("closed-form slow eigenvalue at N = 40") {
  const HatanoNelsonParams p{40, 1.0, 0.17, 0.91};
  const auto s = hn_analytic_spectrum(p);
  const double expected = 0.91 - 2.0 * std::sqrt(0.17) * std::cos(std::numbers::pi / 41.0);
  CHECK(std::abs(s.betas(0).real() - expected) < 1e-15);
  CHECK(s.betas(0).real() == doctest::Approx(0.0878).epsilon(1e-3));
  for (int n = 1; n <= 40; ++n) CHECK(std::abs(s.betas(n - 1) - cdouble(hn_beta(p, n))) < 1e-14);
}

TEST_CASE("closed form is biorthogonal and an eigenbasis") {
  for (int n : {1, 2, 5, 12, 20}) {
    const HatanoNelsonParams p{n, 1.0, 0.17, 0.91};
    const auto s = hn_analytic_spectrum(p);
    const CMatrix x = build_hatano_nelson(p).entries();
    CAPTURE(n);
    CHECK(max_abs(s.left.adjoint() * s.right - CMatrix::Identity(n, n)) < 1e-13);
    for (int k = 1; k <= n; ++k) {
      const CVector r = s.right_mode(k);
      CHECK((x * r - s.betas(k - 1) * r).norm() <= 1e-13 * x.norm() * r.norm());
      const CVector l = s.left_mode(k);
      CHECK((x.adjoint() * l - std::conj(s.betas(k - 1)) * l).norm() <= 1e-13 * x.norm() * l.norm());
    }
  }
}

TEST_CASE("closed form and numeric decomposition agree for N <= 12") {
  for (int n = 1; n <= 12; ++n) {
    const HatanoNelsonParams p{n, 1.0, 0.17, 0.91};
    const auto analytic = hn_analytic_spectrum(p);
    const auto numeric = biorthogonal_decompose(build_hatano_nelson(p));
    CAPTURE(n);
    CHECK(numeric.condition_estimate < kTrustedCondition);
    for (int k = 1; k <= n; ++k) {
      CHECK(std::abs(analytic.betas(k - 1) - numeric.betas(k - 1)) < 1e-10);
      CHECK(unit_overlap(analytic.right_mode(k), numeric.right_mode(k)) >= 1.0 - 1e-8);
    }
  }
}

TEST_CASE("reciprocal closed form is a pure sine basis") {
  const HatanoNelsonParams p{6, 0.8, 0.8, 2.0};
  const auto s = hn_analytic_spectrum(p);
  CHECK(max_abs(s.left - s.right) == 0.0);
  for (int k = 1; k <= 6; ++k)
    for (int j = 1; j <= 6; ++j)
      CHECK(s.right(j - 1, k - 1).real() ==
            doctest::Approx(std::sqrt(2.0 / 7.0) * std::sin(std::numbers::pi * k * j / 7.0)).epsilon(1e-14));
}

TEST_CASE("sine nodes are exact zeros") {
  const auto s = hn_analytic_spectrum({11, 1.0, 0.17, 0.91});
  // n = 6, N + 1 = 12: node at j = 2, 4, ..., 10.
  for (int j = 2; j <= 10; j += 2) {
    CHECK(s.right(j - 1, 5) == cdouble(0.0));
    CHECK(s.left(j - 1, 5) == cdouble(0.0));
  }
}

TEST_CASE("envelope overflow and the normalized fallback") {
  const HatanoNelsonParams huge{1000, 1.0, 0.17, 0.91};
  CHECK(kind_of([&] { hn_analytic_spectrum(huge); }) == ErrorKind::envelope_overflow);
  const CMatrix modes = hn_normalized_right_modes(huge);
  CHECK(modes.allFinite());
  for (Index k = 0; k < 1000; k += 97) CHECK(modes.col(k).norm() == doctest::Approx(1.0).epsilon(1e-12));

  const HatanoNelsonParams p{40, 1.0, 0.17, 0.91};
  const auto s = hn_analytic_spectrum(p);
  const CMatrix normalized = hn_normalized_right_modes(p);
  for (int k = 1; k <= 40; ++k) {
    CHECK(max_abs(euclidean_right_mode(s, k).amplitudes - normalized.col(k - 1)) < 1e-12);
  }
}

TEST_CASE("similarity residual") {
  CHECK(hn_similarity_residual({12, 1.0, 0.17, 0.91}) <= 1e-9);
  CHECK(hn_similarity_residual({12, 0.5, 0.5, 0.91}) == 0.0);
  CHECK(hn_similarity_residual({1, 1.0, 0.17, 0.91}) == 0.0);
  CHECK(kind_of([] { hn_similarity_residual({1000, 1.0, 0.17, 0.91}); }) == ErrorKind::envelope_overflow);
}

TEST_CASE("diagonal-similarity spectrum matches the closed form on long chains") {
  const HatanoNelsonParams p{40, 1.0, 0.17, 0.91};
  const auto x = build_hatano_nelson(p);
  REQUIRE(is_diagonally_symmetrizable(x));
  const auto sim = diagonal_similarity_spectrum(x);
  const auto exact = hn_analytic_spectrum(p);
  CHECK(max_abs(sim.betas - exact.betas) < 1e-13);
  CHECK(max_abs(sim.left.adjoint() * sim.right - CMatrix::Identity(40, 40)) < 1e-13);
  for (int k = 1; k <= 40; ++k) {
    CHECK(unit_overlap(sim.right_mode(k), exact.right_mode(k)) >= 1.0 - 1e-12);
  }
}

TEST_CASE("diagonal-similarity spectrum on nonreciprocal SSH chains") {
  for (double g : {-0.5, 0.0, 0.3, 0.6}) {
    const auto x = build_ssh({20, 0.5, 1.0, g, 1.5});
    REQUIRE(is_diagonally_symmetrizable(x));
    const auto s = diagonal_similarity_spectrum(x);
    const auto health = check_spectrum(s, x.entries());
    CAPTURE(g);
    CHECK(health.biorthogonality_error < 1e-12);
    CHECK(health.max_relative_residual < 1e-13);
    CHECK(s.betas.imag().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("generic complex matrices are not diagonally symmetrizable") {
  CMatrix m = oracle::random_hermitian(4, 3) + cdouble(0.0, 0.3) * oracle::random_hermitian(4, 4);
  CHECK_FALSE(is_diagonally_symmetrizable(RelaxationMatrix(m)));
  CMatrix one_way = CMatrix::Identity(3, 3);
  one_way(1, 0) = -1.0;
  CHECK_FALSE(is_diagonally_symmetrizable(RelaxationMatrix(one_way)));
  CHECK(kind_of([&] { diagonal_similarity_spectrum(RelaxationMatrix(m)); }) == ErrorKind::decomposition);
}

TEST_CASE("near-defective input is rejected") {
  CMatrix jordan = CMatrix::Identity(3, 3);
  jordan(0, 1) = 1.0;
  jordan(2, 2) = 2.0;
  CHECK(kind_of([&] { biorthogonal_decompose(RelaxationMatrix(jordan)); }) == ErrorKind::degeneracy);
  CMatrix block = CMatrix::Identity(2, 2);
  block(0, 1) = 1.0;
  CHECK(kind_of([&] { biorthogonal_decompose(RelaxationMatrix(block)); }) == ErrorKind::degeneracy);
  // Degenerate but diagonalizable is fine.
  const auto s = biorthogonal_decompose(RelaxationMatrix(CMatrix::Identity(3, 3)));
  CHECK(s.condition_estimate == doctest::Approx(1.0));
}

TEST_CASE("eigenvalue ordering: ascending real part, ties by imaginary part") {
  CMatrix x = CMatrix::Zero(3, 3);
  x(0, 0) = cdouble(1.0, 1.0);
  x(1, 1) = cdouble(1.0, -1.0);
  x(2, 2) = 0.5;
  const auto s = biorthogonal_decompose(RelaxationMatrix(x));
  CHECK(s.betas(0) == cdouble(0.5));
  CHECK(s.betas(1) == cdouble(1.0, -1.0));
  CHECK(s.betas(2) == cdouble(1.0, 1.0));
  CHECK(slowest_mode(s) == 1);
}

TEST_CASE("stability of the closed form for kappa above the band edge") {
  for (int n : {1, 2, 7, 40})
    for (double t_left : {0.05, 0.17, 0.9})
      for (double margin : {1e-6, 0.1, 1.0}) {
        const HatanoNelsonParams p{n, 1.0, t_left, 2.0 * std::sqrt(t_left) + margin};
        REQUIRE(p.stable());
        CHECK(hn_analytic_spectrum(p).min_real_beta() > 0.0);
      }
}

TEST_CASE("SSH edge envelopes") {
  {
    const auto [right, left] = ssh_edge_envelopes({6, 0.5, 1.0, 0.0, 1.5});
    for (int n = 1; n < 6; ++n) {
      const cdouble a = right.amplitudes(2 * n - 2);
      const cdouble b = right.amplitudes(2 * n);
      CHECK(std::abs(b / a - cdouble(-0.5)) < 1e-14);
      CHECK(right.amplitudes(2 * n - 1) == cdouble(0.0));
    }
    CHECK(max_abs(right.amplitudes - left.amplitudes) < 1e-15);
    CHECK(right.normalization == Normalization::euclidean);
  }
  {
    const auto [right, left] = ssh_edge_envelopes({6, 0.5, 1.0, 0.2, 1.5});
    CHECK(std::abs(right.amplitudes(2) / right.amplitudes(0) - cdouble(-0.5 * std::exp(0.4))) < 1e-14);
    CHECK(std::abs(left.amplitudes(2) / left.amplitudes(0) - cdouble(-0.5 * std::exp(-0.4))) < 1e-14);
    CHECK(right.amplitudes.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(left.amplitudes.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  {
    // Growing envelope (ratio magnitude > 1) stays finite on long chains.
    const auto [right, left] = ssh_edge_envelopes({400, 0.5, 1.0, 0.6, 1.5});
    CHECK(right.amplitudes.allFinite());
    CHECK(right.amplitudes.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto [single, unused] = ssh_edge_envelopes({1, 0.5, 1.0, 0.3, 1.5});
  CHECK(single.amplitudes(0) == cdouble(1.0));
  CHECK(single.amplitudes(1) == cdouble(0.0));
  CHECK(kind_of([] { ssh_edge_envelopes({4, 1.0, 1.0, 0.0, 1.5}); }) == ErrorKind::regime);
  CHECK(kind_of([] { ssh_edge_envelopes({4, 1.2, 1.0, 0.0, 1.5}); }) == ErrorKind::regime);
}

TEST_CASE("Euclidean normalization and phase gauge") {
  ModeVector v{CVector(2), Normalization::biorthogonal};
  v.amplitudes << 3.0, 4.0;
  const auto a = euclidean_normalize(v);
  CHECK(std::abs(a.amplitudes(0) - 0.6) < 1e-15);
  CHECK(std::abs(a.amplitudes(1) - 0.8) < 1e-15);

  v.amplitudes << 0.0, cdouble(0.0, -2.0);
  const auto b = euclidean_normalize(v);
  CHECK(b.amplitudes(0) == cdouble(0.0));
  CHECK(b.amplitudes(1) == cdouble(1.0));

  const CVector random = oracle::random_vector(5, 11);
  const auto once = euclidean_normalize({random, Normalization::biorthogonal});
  const auto twice = euclidean_normalize({cdouble(0.0, 1.0) * once.amplitudes, Normalization::euclidean});
  CHECK(max_abs(once.amplitudes - twice.amplitudes) < 1e-15);

  CHECK(kind_of([] { euclidean_normalize({CVector::Zero(3), Normalization::biorthogonal}); }) ==
        ErrorKind::normalization);
}

TEST_CASE("slow mode tie-break and gap ratio") {
  CMatrix x = CMatrix::Zero(3, 3);
  x(0, 0) = cdouble(0.5, 0.2);
  x(1, 1) = cdouble(0.5, -0.2);
  x(2, 2) = 1.0;
  const auto s = biorthogonal_decompose(RelaxationMatrix(x));
  CHECK(slowest_mode(s) == 1);
  CHECK(s.betas(0) == cdouble(0.5, -0.2));
  CHECK(spectral_gap_ratio(s) == 0.0);

  const auto hn = hn_analytic_spectrum({40, 1.0, 0.17, 0.91});
  CHECK(spectral_gap_ratio(hn) ==
        doctest::Approx((hn.betas(1).real() - hn.betas(0).real()) / hn.betas(0).real()));
  CMatrix one(1, 1);
  one(0, 0) = 2.0;
  CHECK(std::isinf(spectral_gap_ratio(biorthogonal_decompose(RelaxationMatrix(one)))));
}

TEST_CASE("mode accessors are 1-based and bounds-checked") {
  const auto s = hn_analytic_spectrum({4, 1.0, 0.17, 0.91});
  CHECK(max_abs(s.right_mode(1) - s.right.col(0)) == 0.0);
  CHECK(kind_of([&] { s.right_mode(0); }) == ErrorKind::index);
  CHECK(kind_of([&] { s.left_mode(5); }) == ErrorKind::index);
}
