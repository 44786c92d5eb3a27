#include "skinlock/inverse_design.hpp"
#include "skinlock/orbitals.hpp"
#include "skinlock/steady_state.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace skinlock;

namespace {

const Jump* find_jump(const std::vector<Jump>& jumps, const std::string& label) {
  for (const auto& j : jumps)
    if (j.label == label) return &j;
  return nullptr;
}

double infeasibility_deficit(const std::function<void()>& fn, std::string* site = nullptr) {
  try {
    fn();
  } catch (const InfeasibilityError& e) {
    if (site) *site = e.site();
    return e.deficit();
  }
  FAIL("expected an infeasibility error");
  return 0.0;
}

}  // namespace

TEST_CASE("two-site HN Hamiltonian is an antisymmetric imaginary hopping") {
  const auto x = build_hatano_nelson({2, 1.0, 0.17, 0.91});
  const auto y = build_diagonal_pump(std::vector<double>{0.1, 0.1});
  const auto r = inverse_design(x, y);
  const double half = 0.5 * (1.0 - 0.17);
  CHECK(std::abs(r.hamiltonian(0, 1) - cdouble(0.0, -half)) < 1e-15);
  CHECK(std::abs(r.hamiltonian(1, 0) - cdouble(0.0, half)) < 1e-15);
  CHECK(std::abs(r.hamiltonian(0, 0)) < 1e-15);
  CHECK(hermitian_defect(r.hamiltonian) <= 1e-12);
  CHECK(max_abs(r.gain_gram - y.entries()) == 0.0);
}

TEST_CASE("Hermitian X with no pump") {
  const auto x = build_hatano_nelson({4, 0.5, 0.5, 1.2});
  const auto r = inverse_design(x.entries(), CMatrix::Zero(4, 4));
  CHECK(max_abs(r.hamiltonian) == 0.0);
  CHECK(max_abs(r.loss_gram - 2.0 * x.entries()) == 0.0);
  CHECK(r.physical);
}

TEST_CASE("formal solution round trip on random targets") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const CMatrix x = oracle::random_hermitian(5, seed) + cdouble(0.0, 1.0) * oracle::random_hermitian(5, seed + 10);
    const CMatrix y = oracle::random_psd(5, seed + 20);
    const auto r = inverse_design(x, y);
    CHECK(max_abs(r.relaxation() - x) <= 1e-14 * std::max(1.0, max_abs(x)));
    CHECK(hermitian_defect(r.hamiltonian) <= 1e-12);
    CHECK(hermitian_defect(r.loss_gram) <= 1e-12);
  }
}

TEST_CASE("inverse design input checks and physicality flag") {
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(0, 1) = 0.3;
  CHECK(kind_of([&] { inverse_design(CMatrix(CMatrix::Identity(2, 2)), bad); }) == ErrorKind::parameter);
  CMatrix negative = CMatrix::Identity(2, 2);
  negative(1, 1) = -1.0;
  CHECK(kind_of([&] { inverse_design(CMatrix(CMatrix::Identity(2, 2)), negative); }) == ErrorKind::parameter);
  CHECK(kind_of([&] { inverse_design(CMatrix(CMatrix::Identity(2, 2)), CMatrix(CMatrix::Identity(3, 3))); }) ==
        ErrorKind::parameter);

  // The long-chain reference parameters admit X and Y but not Gamma^- >= 0.
  const auto r = inverse_design(build_hatano_nelson({40, 1.0, 0.17, 0.91}), build_local_pump(40, 15, 0.03));
  CHECK_FALSE(r.physical);
  CHECK(r.loss_min_eigenvalue < -0.1);
}

TEST_CASE("HN jump decomposition, three sites") {
  const HatanoNelsonParams p{3, 1.0, 0.17, 1.5};
  const auto jumps = hn_jump_decomposition(p, 0.1);
  REQUIRE(jumps.losses.size() == 5);
  REQUIRE(jumps.gains.size() == 3);
  const auto* edge = find_jump(jumps.losses, "onsite(1)");
  const auto* bulk = find_jump(jumps.losses, "onsite(2)");
  const auto* last = find_jump(jumps.losses, "onsite(3)");
  const auto* bond = find_jump(jumps.losses, "bond(1)");
  REQUIRE(edge);
  REQUIRE(bulk);
  REQUIRE(last);
  REQUIRE(bond);
  CHECK(edge->coefficients(0).real() == doctest::Approx(std::sqrt(1.73)).epsilon(1e-14));
  CHECK(bulk->coefficients(1).real() == doctest::Approx(std::sqrt(0.56)).epsilon(1e-13));
  CHECK(last->coefficients(2).real() == doctest::Approx(std::sqrt(1.73)).epsilon(1e-14));
  CHECK(bond->coefficients(0).real() == doctest::Approx(std::sqrt(1.17)).epsilon(1e-15));
  CHECK(bond->coefficients(1).real() == doctest::Approx(-std::sqrt(1.17)).epsilon(1e-15));
  for (const auto& g : jumps.gains) CHECK(g.coefficients.cwiseAbs().maxCoeff() == doctest::Approx(std::sqrt(0.1)));

  const auto x = build_hatano_nelson(p);
  const CMatrix y = 0.1 * CMatrix::Identity(3, 3);
  const auto r = inverse_design(x.entries(), y);
  const auto v = validate_jump_set(jumps, r, x.entries(), y);
  CHECK(v.passed);
  CHECK(v.loss_gram_error <= 1e-12);
  CHECK(v.relaxation_error <= 1e-12);
  CHECK(v.loss_min_eigenvalue >= -1e-12);
}

TEST_CASE("HN decomposition is infeasible at the long-chain reference point") {
  std::string site;
  const double deficit = infeasibility_deficit([] { hn_jump_decomposition({40, 1.0, 0.17, 0.91}, 0.03); }, &site);
  CHECK(deficit == doctest::Approx(2.34 - 1.79).epsilon(1e-12));
  CHECK(site == "2");
  CHECK(kind_of([] { hn_jump_decomposition({40, 1.0, 0.17, 0.91}, 0.03); }) == ErrorKind::infeasibility);
}

TEST_CASE("HN decomposition without hopping is purely onsite") {
  const auto jumps = hn_jump_decomposition({4, 0.0, 0.0, 0.8}, 0.2);
  CHECK(jumps.losses.size() == 4);
  for (const auto& j : jumps.losses) CHECK(j.kind == JumpKind::onsite);
  const CMatrix gram = jumps.loss_gram();
  CHECK(max_abs(gram - 1.4 * CMatrix::Identity(4, 4)) < 1e-15);
}

TEST_CASE("SSH decomposition at the saturation boundary") {
  SUBCASE("gamma = 1e-8 misses equality by gamma") {
    std::string site;
    const double deficit = infeasibility_deficit([] { ssh_jump_decomposition({20, 0.5, 1.0, 0.0, 1.5}, 1e-8); }, &site);
    CHECK(deficit == doctest::Approx(1e-8).epsilon(1e-6));
    CHECK(site == "1B");
  }
  SUBCASE("exact equality is feasible with zero interior onsite loss") {
    const double gamma = std::ldexp(1.0, -20);
    const SshParams p{20, 0.5, 1.0, 0.0, 1.5 + std::ldexp(1.0, -21)};
    const auto jumps = ssh_jump_decomposition(p, gamma);
    CHECK(find_jump(jumps.losses, "onsite(5A)")->coefficients(8) == cdouble(0.0));
    CHECK(find_jump(jumps.losses, "onsite(1A)")->coefficients(0).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(find_jump(jumps.losses, "onsite(20B)")->coefficients(39).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    const auto x = build_ssh(p);
    const CMatrix y = gamma * CMatrix::Identity(40, 40);
    CHECK(validate_jump_set(jumps, inverse_design(x.entries(), y), x.entries(), y).passed);
    CHECK(jumps.losses.size() == 20 + 19 + 40);
  }
  SUBCASE("g = 0.2 exceeds the budget by 3 cosh(0.2) - 3") {
    const double deficit = infeasibility_deficit([] { ssh_jump_decomposition({20, 0.5, 1.0, 0.2, 1.5}, 1e-8); });
    CHECK(deficit == doctest::Approx(3.0 * std::cosh(0.2) - 3.0 + 1e-8).epsilon(1e-9));
  }
  SUBCASE("single cell") {
    const auto jumps = ssh_jump_decomposition({1, 0.5, 1.0, 0.3, 1.5}, 0.1);
    int bonds = 0;
    for (const auto& j : jumps.losses) bonds += j.kind == JumpKind::bond;
    CHECK(bonds == 1);
    CHECK(find_jump(jumps.losses, "bond1(1)") != nullptr);
    CHECK(jumps.losses.size() == 3);
  }
}

TEST_CASE("local pump uses the site-dependent replacement rule") {
  const HatanoNelsonParams p{5, 1.0, 0.17, 1.3};
  // Bulk budget 2.6 - 2.34 = 0.26: a pump of 0.3 fits only on an edge site.
  std::vector<double> edge(5, 0.0), bulk(5, 0.0);
  edge[0] = 0.3;
  bulk[2] = 0.3;
  const auto jumps = hn_jump_decomposition(p, edge);
  CHECK(jumps.gains.size() == 1);
  CHECK(jumps.gains[0].label == "pump(1)");
  const auto x = build_hatano_nelson(p);
  const auto y = build_diagonal_pump(edge);
  CHECK(validate_jump_set(jumps, inverse_design(x, y), x.entries(), y.entries()).passed);

  std::string site;
  const double deficit = infeasibility_deficit([&] { hn_jump_decomposition(p, bulk); }, &site);
  CHECK(site == "3");
  CHECK(deficit == doctest::Approx(0.04).epsilon(1e-10));
  CHECK(kind_of([&] { hn_jump_decomposition(p, std::vector<double>{0.1, 0.1}); }) == ErrorKind::parameter);
  CHECK(kind_of([&] { hn_jump_decomposition(p, std::vector<double>{0.1, -0.1, 0, 0, 0}); }) == ErrorKind::parameter);
}

TEST_CASE("onsite coefficients are real and non-negative") {
  const auto jumps = ssh_jump_decomposition({6, 0.4, 1.0, -0.3, 2.0}, 0.05);
  for (const auto& j : jumps.losses) {
    if (j.kind != JumpKind::onsite) continue;
    for (Index k = 0; k < j.coefficients.size(); ++k) {
      CHECK(j.coefficients(k).imag() == 0.0);
      CHECK(j.coefficients(k).real() >= 0.0);
    }
  }
}

TEST_CASE("validation pinpoints a corrupted bond") {
  const HatanoNelsonParams p{4, 1.0, 0.17, 1.6};
  auto jumps = hn_jump_decomposition(p, 0.05);
  const auto x = build_hatano_nelson(p);
  const CMatrix y = 0.05 * CMatrix::Identity(4, 4);
  const auto r = inverse_design(x.entries(), y);
  for (auto& j : jumps.losses)
    if (j.label == "bond(2)") j.coefficients(2) = -j.coefficients(2);
  try {
    validate_jump_set(jumps, r, x.entries(), y);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
    const std::string msg = e.what();
    CHECK(msg.find("bond(2)") != std::string::npos);
    CHECK((msg.find("(2, 3)") != std::string::npos || msg.find("(3, 2)") != std::string::npos));
  }
}

TEST_CASE("physical realizations give occupations in [0, 1]") {
  for (int n : {1, 2, 3, 6, 12})
    for (double t_left : {0.1, 0.5})
      for (double gamma : {0.01, 0.3}) {
        const double kappa = 0.5 * (gamma + 2.0 * (1.0 + t_left)) + 0.05;
        const HatanoNelsonParams p{n, 1.0, t_left, kappa};
        CHECK_NOTHROW(hn_jump_decomposition(p, gamma));
        for (int site : {1, n}) {
          const auto c = solve_lyapunov_direct(build_hatano_nelson(p), build_local_pump(n, site, gamma));
          const auto o = natural_orbitals(c);
          CHECK(o.occupations.minCoeff() >= -1e-10);
          CHECK(o.occupations.maxCoeff() <= 1.0 + 1e-10);
        }
      }
}

TEST_CASE("single site: feasible up to gamma = 2 kappa, full occupation at the boundary") {
  const HatanoNelsonParams p{1, 1.0, 0.17, 0.75};
  CHECK_NOTHROW(hn_jump_decomposition(p, 1.5));
  CHECK(kind_of([&] { hn_jump_decomposition(p, 1.5 + 1e-9); }) == ErrorKind::infeasibility);
  const auto c = solve_lyapunov_direct(build_hatano_nelson(p), build_local_pump(1, 1, 1.5));
  CHECK(c.entries(0, 0) == cdouble(1.0));
  const auto half = solve_lyapunov_direct(build_hatano_nelson(p), build_local_pump(1, 1, 0.6));
  CHECK(std::abs(half.entries(0, 0) - 0.4) < 1e-15);
}
