#include "skinlock/errors.hpp"
#include "skinlock/lattice.hpp"

#include "test_util.hpp"

#include <cmath>
#include <vector>

using namespace skinlock;

TEST_CASE("HN two-site matrix") {
  const auto x = build_hatano_nelson({2, 1.0, 0.17, 0.91}).entries();
  CHECK(x(0, 0) == cdouble(0.91));
  CHECK(x(0, 1) == cdouble(-0.17));
  CHECK(x(1, 0) == cdouble(-1.0));
  CHECK(x(1, 1) == cdouble(0.91));
}

TEST_CASE("HN single site has no bonds") {
  const auto x = build_hatano_nelson({1, 3.0, 0.2, 0.5});
  CHECK(x.dim() == 1);
  CHECK(x.entries()(0, 0) == cdouble(0.5));
  CHECK(x.labels() == std::vector<std::string>{"1"});
}

TEST_CASE("HN reciprocal limit is Hermitian") {
  const auto x = build_hatano_nelson({3, 1.0, 1.0, 3.0}).entries();
  CMatrix expected(3, 3);
  expected << 3, -1, 0, -1, 3, -1, 0, -1, 3;
  CHECK(max_abs(x - expected) == 0.0);
  for (int n : {2, 7, 40}) {
    CHECK(hermitian_defect(build_hatano_nelson({n, 0.8, 0.8, 2.0}).entries()) == 0.0);
  }
}

TEST_CASE("HN structure: constant diagonal, tridiagonal, real") {
  const HatanoNelsonParams p{9, 1.3, 0.4, 0.7};
  const auto x = build_hatano_nelson(p).entries();
  for (Index i = 0; i < 9; ++i) {
    for (Index j = 0; j < 9; ++j) {
      cdouble expected = 0.0;
      if (i == j) expected = p.kappa;
      if (i == j + 1) expected = -p.t_right;
      if (j == i + 1) expected = -p.t_left;
      CHECK(x(i, j) == expected);
    }
  }
  CHECK(build_hatano_nelson(p).labels().back() == "9");
}

TEST_CASE("HN rejects bad parameters") {
  CHECK(kind_of([] { build_hatano_nelson({3, 0.0, 0.2, 1.0}); }) == ErrorKind::parameter);
  CHECK(kind_of([] { build_hatano_nelson({3, 1.0, -0.2, 1.0}); }) == ErrorKind::parameter);
  CHECK(kind_of([] { build_hatano_nelson({0, 1.0, 0.2, 1.0}); }) == ErrorKind::parameter);
}

TEST_CASE("HN stability predicate") {
  CHECK(HatanoNelsonParams{40, 1.0, 0.17, 0.91}.stable());
  CHECK_FALSE(HatanoNelsonParams{40, 1.0, 0.17, 0.8}.stable());
}

TEST_CASE("SSH one cell, reciprocal") {
  const auto x = build_ssh({1, 0.5, 1.0, 0.0, 1.5}).entries();
  CMatrix expected(2, 2);
  expected << 1.5, -0.5, -0.5, 1.5;
  CHECK(max_abs(x - expected) == 0.0);
}

TEST_CASE("SSH nonreciprocal entries follow t e^{+-g} in the interleaved basis") {
  const SshParams p{3, 0.5, 1.0, 0.3, 1.5};
  const auto x = build_ssh(p);
  const auto& m = x.entries();
  const auto at = [&](int cell, Sublattice s) { return ssh_index(cell, s, p.n_cells) - 1; };
  CHECK(m(at(1, Sublattice::B), at(1, Sublattice::A)).real() == doctest::Approx(-0.5 * std::exp(0.3)).epsilon(1e-15));
  for (int n = 1; n <= 3; ++n) {
    const Index a = at(n, Sublattice::A);
    const Index b = at(n, Sublattice::B);
    CHECK(std::abs(m(b, a) + 0.5 * std::exp(0.3)) < 1e-15);
    CHECK(std::abs(m(a, b) + 0.5 * std::exp(-0.3)) < 1e-15);
    CHECK(m(a, a) == cdouble(1.5));
    CHECK(m(b, b) == cdouble(1.5));
    if (n < 3) {
      const Index next = at(n + 1, Sublattice::A);
      CHECK(std::abs(m(next, b) + std::exp(0.3)) < 1e-15);
      CHECK(std::abs(m(b, next) + std::exp(-0.3)) < 1e-15);
    }
  }
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 6; ++j)
      if (std::abs(i - j) > 1) CHECK(m(i, j) == cdouble(0.0));
  CHECK(x.labels() == std::vector<std::string>{"1A", "1B", "2A", "2B", "3A", "3B"});
}

TEST_CASE("SSH two cells at g = 0.2: (1B,1A) entry") {
  const auto m = build_ssh({2, 0.5, 1.0, 0.2, 1.5}).entries();
  CHECK(std::abs(m(1, 0) - cdouble(-0.5 * std::exp(0.2))) < 1e-15);
}

TEST_CASE("SSH g = 0 is real symmetric") {
  const auto m = build_ssh({5, 0.7, 1.1, 0.0, 2.0}).entries();
  CHECK(max_abs(m - m.transpose()) == 0.0);
  CHECK(m.imag().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("SSH rejects bad parameters") {
  CHECK(kind_of([] { build_ssh({2, 0.0, 1.0, 0.0, 1.5}); }) == ErrorKind::parameter);
  CHECK(kind_of([] { build_ssh({2, 0.5, -1.0, 0.0, 1.5}); }) == ErrorKind::parameter);
  CHECK(kind_of([] { build_ssh({0, 0.5, 1.0, 0.0, 1.5}); }) == ErrorKind::parameter);
}

TEST_CASE("ssh_index flattening") {
  CHECK(ssh_index(1, Sublattice::A, 3) == 1);
  CHECK(ssh_index(1, Sublattice::B, 3) == 2);
  CHECK(ssh_index(3, Sublattice::A, 3) == 5);
  CHECK(kind_of([] { ssh_index(4, Sublattice::A, 3); }) == ErrorKind::index);
  CHECK(kind_of([] { ssh_index(0, Sublattice::B, 3); }) == ErrorKind::index);
}

TEST_CASE("local pump") {
  const auto y = build_local_pump(40, 15, 0.03);
  CHECK(y.dim() == 40);
  CHECK(y.entries()(14, 14) == cdouble(0.03));
  CHECK(y.entries().cwiseAbs().sum() == doctest::Approx(0.03));
  CHECK(y.is_diagonal());
  const auto small = build_local_pump(2, 1, 1.0).entries();
  CMatrix expected = CMatrix::Zero(2, 2);
  expected(0, 0) = 1.0;
  CHECK(max_abs(small - expected) == 0.0);
  CHECK(kind_of([] { build_local_pump(4, 5, 1.0); }) == ErrorKind::index);
  CHECK(kind_of([] { build_local_pump(4, 0, 1.0); }) == ErrorKind::index);
  CHECK(kind_of([] { build_local_pump(4, 2, 0.0); }) == ErrorKind::parameter);
}

TEST_CASE("diagonal pump") {
  const std::vector<double> uniform(5, 0.25);
  CHECK(max_abs(build_diagonal_pump(uniform).entries() - 0.25 * CMatrix::Identity(5, 5)) == 0.0);
  std::vector<double> local(6, 0.0);
  local[3] = 0.7;
  CHECK(max_abs(build_diagonal_pump(local).entries() - build_local_pump(6, 4, 0.7).entries()) == 0.0);
  const std::vector<double> ramp = {1, 2, 3};
  const auto y = build_diagonal_pump(ramp).entries();
  CHECK(y(0, 0) == cdouble(1.0));
  CHECK(y(1, 1) == cdouble(2.0));
  CHECK(y(2, 2) == cdouble(3.0));
  const std::vector<double> bad = {1, -1e-3};
  CHECK(kind_of([&] { build_diagonal_pump(bad); }) == ErrorKind::parameter);
}

TEST_CASE("matrix type invariants") {
  CMatrix nonsquare(2, 3);
  nonsquare.setZero();
  CHECK(kind_of([&] { RelaxationMatrix{nonsquare}; }) == ErrorKind::parameter);
  CMatrix inf = CMatrix::Identity(2, 2);
  inf(0, 1) = std::numeric_limits<double>::infinity();
  CHECK(kind_of([&] { RelaxationMatrix{inf}; }) == ErrorKind::parameter);
  CHECK(kind_of([&] { RelaxationMatrix(CMatrix::Identity(2, 2), {"a"}); }) == ErrorKind::parameter);

  CMatrix skew = CMatrix::Identity(2, 2);
  skew(0, 1) = cdouble(0.0, 1e-9);
  CHECK(kind_of([&] { SourceMatrix{skew}; }) == ErrorKind::parameter);
  CMatrix indefinite = CMatrix::Identity(2, 2);
  indefinite(1, 1) = -0.1;
  CHECK(kind_of([&] { SourceMatrix{indefinite}; }) == ErrorKind::parameter);
  CMatrix offdiag = CMatrix::Identity(2, 2);
  offdiag(0, 1) = offdiag(1, 0) = 0.5;
  CHECK_FALSE(SourceMatrix(offdiag).is_diagonal());
}
