#include <doctest.h>

#include <cmath>
#include <random>

#include "delaynf/errors.hpp"
#include "delaynf/linalg.hpp"
#include "delaynf/symmetry.hpp"
#include "oracles.hpp"

using namespace delaynf;

namespace {

// Center layout (x0, x1, xb1, nu) with 3 components.
Poly center1(int s = 0) { return Poly(4 + s, 3, s); }

// Fixed subspace of the torus action on nu-free fields, by quadrature: rank of
// the Haar-average matrix over the full basis.
int haar_fixed_dimension(int p, int s, int degree) {
  const SpaceDesc space{.p = p, .s = s, .degree = degree, .components = 2 * p + 1, .flavor = Flavor::nu_independent};
  const Basis b(space);
  Eigen::MatrixXcd P(b.size(), b.size());
  for (int i = 0; i < b.size(); ++i) P.col(i) = b.to_vector(oracle::haar_average(b.element(i), p, true));
  return linalg::numerical_rank(P, 1e-9);
}

}  // namespace

TEST_SUITE("symmetry") {

TEST_CASE("projection with nu frozen") {
  Poly f = center1();
  f.add(0, Monomial{2, 0, 0, 0}, 1.0);
  CHECK(distance(project_A_ring(f), f) == 0.0);

  Poly g = center1();
  g.add(0, Monomial{0, 2, 0, 0}, 1.0);
  CHECK(project_A_ring(g).is_zero());
  CHECK(oracle::haar_average(g, 1, true).is_zero());

  Poly h = center1();
  h.add(0, Monomial{1, 0, 0, 1}, 1.0);
  CHECK(project_A_ring(h).is_zero());
}

TEST_CASE("projection on nu-independent fields") {
  Poly kept = center1();
  kept.add(1, Monomial{1, 1, 0, 0}, 1.0);
  CHECK(distance(project_A(kept), kept) == 0.0);
  CHECK(distance(oracle::haar_average(kept, 1, false), kept) < 1e-12);

  Poly dropped = center1();
  dropped.add(1, Monomial{2, 0, 0, 0}, 1.0);
  CHECK(project_A(dropped).is_zero());
  CHECK(oracle::haar_average(dropped, 1, false).is_zero());

  CHECK(project_A(center1()).is_zero());

  Poly nu_dep = center1();
  nu_dep.add(0, Monomial{1, 0, 0, 1}, 1.0);
  CHECK_THROWS_AS(project_A(nu_dep), PreconditionError);
}

TEST_CASE("integer resonance filter agrees with Haar quadrature on random fields") {
  std::mt19937_64 rng(17);
  for (int p = 1; p <= 2; ++p) {
    for (int degree = 2; degree <= 4; ++degree) {
      const int n = 2 * p + 2 + 1;
      const Poly f = oracle::random_poly(n, 2 * p + 1, 1, degree, 40, rng);
      CHECK(distance(project_A_ring(f), oracle::haar_average(f, p, true)) < 1e-12);
    }
  }
}

TEST_CASE("projections are idempotent") {
  std::mt19937_64 rng(19);
  const Poly f = oracle::random_poly(6, 5, 0, 3, 60, rng);
  const Poly a = project_A_ring(f);
  CHECK(distance(project_A_ring(a), a) == 0.0);
  CHECK(distance(project_A(project_A_ring(f)), project_A_ring(f)) == 0.0);
}

TEST_CASE("projection commutes with the parameter split") {
  std::mt19937_64 rng(23);
  const Poly f = oracle::random_poly(5, 3, 1, 3, 40, rng);
  const auto [h, q] = split_parameter(f);
  const auto [ah, aq] = split_parameter(project_A_ring(f));
  CHECK(distance(ah, project_A_ring(h)) == 0.0);
  CHECK(distance(aq, project_A_ring(q)) == 0.0);
}

TEST_CASE("torus-equivariant basis dimensions") {
  const auto b2 = equivariant_basis(1, 0, 2, EquivariantKind::torus_nu_independent);
  CHECK(b2.size() == 4);
  CHECK(static_cast<int>(b2.size()) == haar_fixed_dimension(1, 0, 2));
  CHECK(equivariant_basis(1, 0, 3, EquivariantKind::torus_nu_independent).size() == 6);
  CHECK(haar_fixed_dimension(1, 0, 3) == 6);
  CHECK(static_cast<int>(equivariant_basis(2, 1, 3, EquivariantKind::torus_nu_independent).size()) ==
        haar_fixed_dimension(2, 1, 3));
  for (const auto& e : b2) {
    CHECK(check_reality(e).ok);
    CHECK(distance(project_A_ring(e), e) == 0.0);
  }
}

TEST_CASE("range of the projection is spanned by the equivariant basis") {
  const auto basis = equivariant_basis(1, 1, 3, EquivariantKind::torus_nu_independent);
  const SpaceDesc full{.p = 1, .s = 1, .degree = 3, .components = 3};
  const Basis b(full);
  Eigen::MatrixXcd E(b.size(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) E.col(static_cast<Eigen::Index>(i)) = b.to_vector(basis[i]);
  Eigen::MatrixXcd A(b.size(), b.size());
  for (int i = 0; i < b.size(); ++i) A.col(i) = b.to_vector(project_A_ring(b.element(i)));
  const int rank_A = linalg::numerical_rank(A, 1e-12);
  CHECK(rank_A == static_cast<int>(basis.size()));
  Eigen::MatrixXcd both(b.size(), E.cols() + A.cols());
  both << E, A;
  CHECK(linalg::numerical_rank(both, 1e-12) == rank_A);
}

TEST_CASE("full symmetry group basis") {
  const auto basis = equivariant_basis(1, 0, 2, EquivariantKind::full_gamma);
  CHECK(basis.size() == 5);
  for (const auto& f : basis) {
    CHECK(f.ncomponents() == 4);
    for (const auto& [m, c] : f[0]) CHECK(m[0] >= 1);
  }
}

TEST_CASE("radial projection") {
  Poly f = center1();
  f.add(0, Monomial{0, 1, 1, 0}, 1.0);
  const Poly r = radial_project(f);
  CHECK(r.ncomponents() == 2);
  CHECK(r.coeff(0, Monomial{0, 2}) == cplx{1.0});

  Poly g = center1();
  const cplx a{0.3, -1.7};
  g.add(1, Monomial{1, 1, 0, 0}, a);
  g.add(2, Monomial{1, 0, 1, 0}, std::conj(a));
  const Poly rg = radial_project(g);
  CHECK(rg.term_count() == 1);
  CHECK(rg.coeff(1, Monomial{1, 1}) == cplx{0.3});

  Poly bad = center1();
  bad.add(0, Monomial{0, 2, 0, 0}, 1.0);
  CHECK_THROWS_AS(radial_project(bad), PreconditionError);
}

TEST_CASE("radial image dimension and surjectivity") {
  for (int degree = 2; degree <= 4; ++degree) {
    const Basis target = radial_basis(1, 0, degree);
    CHECK(target.size() == degree + 1);
    const auto eq = equivariant_basis(1, 0, degree, EquivariantKind::torus_nu_independent);
    Eigen::MatrixXcd M(target.size(), static_cast<Eigen::Index>(eq.size()));
    for (std::size_t i = 0; i < eq.size(); ++i) M.col(static_cast<Eigen::Index>(i)) = target.to_vector(radial_project(eq[i]));
    CHECK(linalg::numerical_rank(M, 1e-12) == target.size());
  }
  const Basis p2 = radial_basis(2, 1, 3);
  const auto eq2 = equivariant_basis(2, 1, 3, EquivariantKind::torus_nu_independent);
  Eigen::MatrixXcd M2(p2.size(), static_cast<Eigen::Index>(eq2.size()));
  for (std::size_t i = 0; i < eq2.size(); ++i) M2.col(static_cast<Eigen::Index>(i)) = p2.to_vector(radial_project(eq2[i]));
  CHECK(linalg::numerical_rank(M2, 1e-12) == p2.size());
}

TEST_CASE("angular extraction") {
  Poly f = center1();
  f.add(1, Monomial{1, 1, 0, 0}, cplx{0.0, 1.0});
  f.add(2, Monomial{1, 0, 1, 0}, cplx{0.0, -1.0});
  const Poly a = angular_extract(f);
  CHECK(a.ncomponents() == 1);
  CHECK(a.coeff(0, Monomial{1, 0}) == cplx{1.0});

  Poly real = center1();
  real.add(1, Monomial{0, 2, 1, 0}, 2.5);
  real.add(2, Monomial{0, 1, 2, 0}, 2.5);
  CHECK(angular_extract(real).is_zero());
}

TEST_CASE("time average of an equivariant field is the field") {
  Poly f = center1();
  f.add(0, Monomial{2, 0, 0, 0}, 1.0);
  f.add(1, Monomial{1, 1, 0, 0}, cplx{0.5, 0.25});
  const std::vector<double> w{1.0};
  for (double T : {1.0, 10.0, 37.5}) CHECK(distance(time_average(f, w, T, 400), f) < 1e-14);
  CHECK(time_average(center1(), w, 10.0, 10).is_zero());
}

TEST_CASE("time average error has the closed form |2 sin(phi T / 2)| / (phi T)") {
  Poly f = center1();
  f.add(0, Monomial{0, 2, 0, 0}, 1.0);
  const std::vector<double> w{1.0};
  for (double T : {100.0, 200.0}) {
    const double err = time_average(f, w, T, 200 * static_cast<int>(T)).norm();
    const double phi = 2.0;
    CHECK(err == doctest::Approx(std::abs(2.0 * std::sin(phi * T / 2.0)) / (phi * T)).epsilon(1e-6));
  }
}

TEST_CASE("time average converges to the projection at rate 1/T") {
  std::mt19937_64 rng(29);
  const std::vector<double> w{1.0};
  for (int trial = 0; trial < 10; ++trial) {
    Poly f = oracle::random_poly(4, 3, 0, 3, 10, rng);
    Poly nu_free = f.zero_like();
    for (int k = 0; k < 3; ++k) {
      for (const auto& [m, c] : f[k]) {
        if (m[3] == 0) nu_free.add(k, m, c);
      }
    }
    // |average factor| <= 2 / (phi T) with phi >= 1 for every non-resonant term.
    for (double T : {50.0, 100.0, 200.0}) {
      const double err = distance(time_average(nu_free, w, T, 20 * static_cast<int>(T)), project_A(nu_free));
      CHECK(err <= 2.0 * nu_free.norm() / T + 1e-9);
    }
  }
}

TEST_CASE("time average guards against under-resolved quadrature") {
  Poly f = center1();
  f.add(0, Monomial{0, 2, 0, 0}, 1.0);
  const std::vector<double> w{1.0};
  CHECK_THROWS_AS(time_average(f, w, 100.0, 50), PreconditionError);
  CHECK_THROWS_AS(time_average(f, w, -1.0, 50), PreconditionError);
}

}  // TEST_SUITE
