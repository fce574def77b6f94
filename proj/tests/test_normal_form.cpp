#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "delaynf/errors.hpp"
#include "delaynf/normal_form.hpp"
#include "delaynf/symmetry.hpp"
#include "oracles.hpp"

using namespace delaynf;

namespace {

const std::vector<double> kW1{1.0};
const std::vector<double> kW2{1.0, std::sqrt(2.0)};

struct Setup {
  DelayKernel kernel;
  SpectralData data;
};

Setup setup(const std::vector<double>& omegas) {
  std::vector<double> pts;
  for (std::size_t i = 0; i < 2 * omegas.size() + 1; ++i) pts.push_back(-static_cast<double>(i));
  const KernelDesign d = design_kernel(omegas, pts);
  return {d.kernel, spectral_data(d.kernel, omegas)};
}

OdeJet jet_from(const Poly& f, const std::vector<double>& omegas, int order) {
  OdeJet j;
  j.p = static_cast<int>(omegas.size());
  j.s = f.nparams();
  j.omegas = omegas;
  j.f = f;
  j.order = order;
  j.h.assign(static_cast<std::size_t>(order + 1), f.zero_like());
  j.q = j.h;
  for (int d = 2; d <= order; ++d) {
    auto [h, q] = split_parameter(f.homogeneous_part(d));
    j.h[static_cast<std::size_t>(d)] = h;
    j.q[static_cast<std::size_t>(d)] = q;
  }
  return j;
}

RfdeModel random_model(const Setup& st, const std::vector<double>& omegas, int s, int order, std::mt19937_64& rng) {
  const int d = static_cast<int>(omegas.size()) + 1;
  std::vector<double> tau;
  for (const auto& t : sample_delays(st.kernel.r, d, 1, rng())) tau = t.tau;
  RfdeModel m = RfdeModel::with_zero_nonlinearity(st.kernel, omegas, DelayTuple{tau}, s, order);
  std::normal_distribution<double> g;
  for (int deg = 2; deg <= order; ++deg) {
    for (const auto& mon : monomials_of_degree(d + s, deg)) {
      int mu = 0;
      for (int t = 0; t < s; ++t) mu += mon[d + t];
      (mu == 0 ? m.eta : m.xi).add(0, mon, g(rng));
    }
  }
  return m;
}

// Degree-2 closed forms of the Guckenheimer coefficients.
std::array<double, 3> closed_forms(const std::array<double, 7>& A, const DelayTuple& tau, const SpectralData& s) {
  const double u0 = s.psi0(0).real();
  const cplx u1 = s.psi0(1);
  const double w = s.omegas[0];
  const cplx z1 = std::exp(cplx{0.0, w * tau.tau[0]});
  const cplx z2 = std::exp(cplx{0.0, w * tau.tau[1]});
  return {u0 * (A[0] + A[1] + A[2]),
          u0 * (2.0 * A[0] + 2.0 * std::cos(w * (tau.tau[0] - tau.tau[1])) * A[1] + 2.0 * A[2]),
          (u1 * (2.0 * z1 * A[0] + (z1 + z2) * A[1] + 2.0 * z2 * A[2])).real()};
}

struct TermLess {
  bool operator()(const std::pair<int, Monomial>& a, const std::pair<int, Monomial>& b) const {
    if (a.first != b.first) return a.first < b.first;
    return GradedLex{}(a.second, b.second);
  }
};
using Support = std::set<std::pair<int, Monomial>, TermLess>;

Support support(const Poly& f, double tol = 1e-12) {
  Support out;
  for (int k = 0; k < f.ncomponents(); ++k) {
    for (const auto& [m, c] : f[k]) {
      if (std::abs(c) > tol) out.emplace(k, m);
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("normal_form") {

TEST_CASE("model validation") {
  const auto st = setup(kW1);
  RfdeModel m = RfdeModel::with_zero_nonlinearity(st.kernel, kW1, DelayTuple{{0.0, -1.0}}, 1, 3);
  CHECK_NOTHROW(m.validate());
  RfdeModel lin = m;
  lin.eta.add(0, Monomial{1, 0, 0}, 1.0);
  CHECK_THROWS_AS(lin.validate(), PreconditionError);
  RfdeModel mu_eta = m;
  mu_eta.eta.add(0, Monomial{1, 0, 1}, 1.0);
  CHECK_THROWS_AS(mu_eta.validate(), PreconditionError);
  RfdeModel free_xi = m;
  free_xi.xi.add(0, Monomial{1, 1, 0}, 1.0);
  CHECK_THROWS_AS(free_xi.validate(), PreconditionError);
  RfdeModel cplx_eta = m;
  cplx_eta.eta.add(0, Monomial{2, 0, 0}, cplx{0.0, 1.0});
  CHECK_THROWS_AS(cplx_eta.validate(), PreconditionError);
}

TEST_CASE("reduction of a zero nonlinearity") {
  const auto st = setup(kW1);
  const RfdeModel m = RfdeModel::with_zero_nonlinearity(st.kernel, kW1, DelayTuple{{0.0, -1.0}}, 0, 3);
  const OdeJet j = reduce_to_ode(m, st.data);
  CHECK(j.f.is_zero());
  CHECK(j.f.nvars() == 4);
  CHECK(j.f.ncomponents() == 3);
}

TEST_CASE("reduction of a square at the zero delay") {
  const auto st = setup(kW1);
  RfdeModel m = RfdeModel::with_zero_nonlinearity(st.kernel, kW1, DelayTuple{{0.0, -1.0}}, 0, 2);
  m.eta.add(0, Monomial{2, 0}, 1.0);
  const OdeJet j = reduce_to_ode(m, st.data);
  CHECK(std::abs(j.h[2].coeff(0, Monomial{2, 0, 0, 0}) - st.data.psi0(0)) < 1e-15);
}

TEST_CASE("reduction agrees with pointwise evaluation of the history") {
  // z(t + tau_i) = x0 + tau_i nu + sum_j (e^{i w_j tau_i} x_j + c.c.) on the center subspace.
  const auto st = setup(kW2);
  std::mt19937_64 rng(67);
  const RfdeModel m = random_model(st, kW2, 1, 3, rng);
  const OdeJet j = reduce_to_ode(m, st.data);
  for (int trial = 0; trial < 3; ++trial) {
    const auto pt = oracle::random_point(7, rng);
    std::vector<cplx> slots;
    for (double t : m.delays.tau) {
      cplx z = pt[0] + t * pt[5];
      for (int q = 1; q <= 2; ++q) {
        const double w = kW2[static_cast<std::size_t>(q - 1)];
        z += std::exp(cplx{0.0, w * t}) * pt[static_cast<std::size_t>(2 * q - 1)] +
             std::exp(cplx{0.0, -w * t}) * pt[static_cast<std::size_t>(2 * q)];
      }
      slots.push_back(z);
    }
    slots.push_back(pt[6]);
    const cplx F = m.nonlinearity().evaluate(0, slots);
    for (int k = 0; k < 5; ++k) CHECK(std::abs(j.f.evaluate(k, pt) - st.data.psi0(k) * F) <= 1e-11 * std::max(1.0, std::abs(F)));
  }
  for (int d = 2; d <= 3; ++d) {
    CHECK(distance(j.h[static_cast<std::size_t>(d)] + j.q[static_cast<std::size_t>(d)], j.f.homogeneous_part(d)) == 0.0);
    CHECK(split_parameter(j.h[static_cast<std::size_t>(d)]).second.is_zero());
    CHECK(split_parameter(j.q[static_cast<std::size_t>(d)]).first.is_zero());
  }
  CHECK(check_reality(j.f, 1e-12).ok);
}

TEST_CASE("equivariant input is already in normal form") {
  Poly f(4, 3);
  f.add(0, Monomial{2, 0, 0, 0}, 0.7);
  f.add(0, Monomial{0, 1, 1, 0}, -1.1);
  f.add(1, Monomial{1, 1, 0, 0}, cplx{0.3, 0.4});
  f.add(2, Monomial{1, 0, 1, 0}, cplx{0.3, -0.4});
  f.add(1, Monomial{0, 2, 1, 0}, cplx{-0.2, 1.5});
  f.add(2, Monomial{0, 1, 2, 0}, cplx{-0.2, -1.5});
  const NormalFormOutput nf = normal_form(jet_from(f, kW1, 3), 3);
  CHECK(distance(nf.g[2], f.homogeneous_part(2)) == 0.0);
  CHECK(distance(nf.g[3], f.homogeneous_part(3)) == 0.0);
  CHECK(nf.U[2].is_zero());
  CHECK(nf.U[3].is_zero());
  CHECK(nf.Y[3].is_zero());
}

TEST_CASE("degree two has no corrections") {
  const auto st = setup(kW1);
  std::mt19937_64 rng(71);
  const RfdeModel m = random_model(st, kW1, 1, 3, rng);
  const OdeJet j = reduce_to_ode(m, st.data);
  const NormalFormOutput ode = normal_form(j, 3, NfMode::ode_reduction);
  const NormalFormOutput lead = normal_form(j, 3, NfMode::leading);
  CHECK(ode.Y[2].is_zero());
  CHECK(ode.Z[2].is_zero());
  CHECK(distance(ode.g[2], project_A_ring(j.f.homogeneous_part(2))) == 0.0);
  CHECK(distance(ode.g[2], lead.g[2]) == 0.0);
  CHECK(distance(ode.radial.homogeneous_part(2), lead.radial.homogeneous_part(2)) == 0.0);
  CHECK(ode.homological_residual[2] <= 1e-9);
}

TEST_CASE("degree three corrections match the substitution oracle") {
  // For f = f2 and x = y + U2(y): Y3 + Z3 = Df2(y) U2(y) - DU2(y) g2(y). Both
  // directional derivatives are exact polarizations of quadratics.
  for (const auto* w : {&kW1, &kW2}) {
    const int p = static_cast<int>(w->size());
    const int n = 2 * p + 2 + 1;
    std::mt19937_64 rng(73 + static_cast<unsigned>(p));
    const Poly f2 = oracle::realify(oracle::random_poly(n, 2 * p + 1, 1, 2, 30, rng), p);
    const NormalFormOutput nf = normal_form(jet_from(f2, *w, 3), 3);
    const Poly& U = nf.U[2];
    const Poly& g = nf.g[2];
    const Poly corr = nf.Y[3] + nf.Z[3];
    auto eval = [&](const Poly& P, const std::vector<cplx>& pt) {
      std::vector<cplx> v(static_cast<std::size_t>(2 * p + 1));
      for (int k = 0; k < 2 * p + 1; ++k) v[static_cast<std::size_t>(k)] = P.evaluate(k, pt);
      return v;
    };
    auto pad = [&](const std::vector<cplx>& v) {
      std::vector<cplx> out(static_cast<std::size_t>(n), 0.0);
      std::copy(v.begin(), v.end(), out.begin());
      return out;
    };
    auto shifted = [&](std::vector<cplx> pt, const std::vector<cplx>& v) {
      for (std::size_t k = 0; k < v.size(); ++k) pt[k] += v[k];
      return pt;
    };
    for (int trial = 0; trial < 4; ++trial) {
      const auto pt = oracle::random_point(n, rng);
      const auto Uy = eval(U, pt);
      const auto gy = eval(g, pt);
      const auto a = eval(f2, shifted(pt, Uy));
      const auto b = eval(f2, pt);
      const auto c = eval(f2, pad(Uy));
      const auto d = eval(U, shifted(pt, gy));
      const auto e = eval(U, pad(gy));
      for (int k = 0; k < 2 * p + 1; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const cplx expected = (a[kk] - b[kk] - c[kk]) - (d[kk] - Uy[kk] - e[kk]);
        CHECK(std::abs(corr.evaluate(k, pt) - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
      }
    }
    CHECK(distance(nf.g[3], project_A_ring(corr)) <= 1e-12);
  }
}

TEST_CASE("normal form is idempotent") {
  const auto st = setup(kW1);
  std::mt19937_64 rng(79);
  const RfdeModel m = random_model(st, kW1, 1, 4, rng);
  const NormalFormOutput nf = normal_form(reduce_to_ode(m, st.data), 4);
  const Poly g = nf.equivariant_field();
  const NormalFormOutput again = normal_form(jet_from(g, kW1, 4), 4);
  for (int d = 2; d <= 4; ++d) {
    CHECK(distance(again.g[static_cast<std::size_t>(d)], nf.g[static_cast<std::size_t>(d)]) <= 1e-12);
    CHECK(again.U[static_cast<std::size_t>(d)].is_zero());
  }
}

TEST_CASE("output is equivariant and real") {
  const auto st = setup(kW2);
  std::mt19937_64 rng(83);
  const RfdeModel m = random_model(st, kW2, 1, 3, rng);
  const NormalFormOutput nf = normal_form(reduce_to_ode(m, st.data), 3);
  for (int d = 2; d <= 3; ++d) {
    const Poly& g = nf.g[static_cast<std::size_t>(d)];
    CHECK(distance(project_A_ring(g), g) == 0.0);
    CHECK(check_reality(g, 1e-10).ok);
    CHECK(split_parameter(nf.Z[static_cast<std::size_t>(d)]).first.is_zero());
  }
  for (int k = 0; k <= 2; ++k) {
    for (const auto& [mm, c] : nf.radial[k]) CHECK(is_radially_equivariant(2, k, mm));
  }
}

TEST_CASE("transform with a zero generator is the identity") {
  std::mt19937_64 rng(89);
  const Poly F = oracle::random_poly(5, 3, 1, 3, 10, rng);
  CHECK(distance(transform_field(F, F.zero_like(), kW1, 3), F) == 0.0);
}

TEST_CASE("polar decoupling") {
  NormalFormOutput nf;
  nf.p = 1;
  nf.s = 0;
  nf.omegas = kW1;
  nf.g.assign(3, Poly(4, 3));
  PolarSystem zero = polar_decouple(nf);
  CHECK(zero.radial.is_zero());
  CHECK(zero.angular.is_zero());
  CHECK(zero.nu_forcing);

  nf.g[2].add(0, Monomial{0, 1, 1, 0}, 1.0);
  const PolarSystem ps = polar_decouple(nf);
  CHECK(ps.radial.coeff(0, Monomial{0, 2}) == cplx{1.0});
  CHECK(ps.omegas == kW1);
}

TEST_CASE("Guckenheimer coefficients at degree two") {
  const auto st = setup(kW1);
  const std::array<double, 7> A{0.8, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  const DelayTuple tau{{0.0, -1.3}};
  const auto gc = guckenheimer_example(A, tau, st.data, st.kernel);
  const double u0 = st.data.psi0(0).real();
  CHECK(gc.a1 == doctest::Approx(u0 * 0.8).epsilon(1e-12));
  CHECK(gc.a2 == doctest::Approx(2.0 * u0 * 0.8).epsilon(1e-12));
  CHECK(gc.b1 == doctest::Approx(2.0 * st.data.psi0(1).real() * 0.8).epsilon(1e-12));

  const auto zero = guckenheimer_example({}, tau, st.data, st.kernel);
  for (double v : {zero.a1, zero.a2, zero.a3, zero.a4, zero.b1, zero.b2, zero.b3}) CHECK(v == 0.0);

  std::mt19937_64 rng(97);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    std::array<double, 7> R{};
    for (double& a : R) a = g(rng);
    const DelayTuple t = sample_delays(st.kernel.r, 2, 1, rng())[0];
    const auto out = guckenheimer_example(R, t, st.data, st.kernel);
    const auto cf = closed_forms(R, t, st.data);
    CHECK(std::abs(out.a1 - cf[0]) <= 1e-10);
    CHECK(std::abs(out.a2 - cf[1]) <= 1e-10);
    CHECK(std::abs(out.b1 - cf[2]) <= 1e-10);
  }
}

TEST_CASE("Guckenheimer monomial support") {
  const auto st = setup(kW1);
  const std::array<double, 7> A{0.4, -1.2, 0.9, 0.3, 0.7, -0.5, 1.1};
  const auto gc = guckenheimer_example(A, DelayTuple{{-0.2, -1.5}}, st.data, st.kernel);
  const Support radial{
      {0, Monomial{2, 0}}, {0, Monomial{0, 2}}, {0, Monomial{3, 0}}, {0, Monomial{1, 2}},
      {1, Monomial{1, 1}}, {1, Monomial{0, 3}}, {1, Monomial{2, 1}}};
  CHECK(support(gc.nf.radial) == radial);
  const Support angular{{0, Monomial{1, 0}}, {0, Monomial{2, 0}}, {0, Monomial{0, 2}}};
  CHECK(support(gc.nf.angular) == angular);
  CHECK(gc.nf.mode == NfMode::ode_reduction);
}

TEST_CASE("degree-two Jacobian of the Guckenheimer map is full rank") {
  const auto st = setup(kW1);
  const DelayTuple tau{{-0.4, -1.1}};
  Eigen::Matrix3d J;
  for (int i = 0; i < 3; ++i) {
    std::array<double, 7> A{};
    A[static_cast<std::size_t>(i)] = 1.0;
    const auto gc = guckenheimer_example(A, tau, st.data, st.kernel);
    J.col(i) << gc.a1, gc.a2, gc.b1;
  }
  CHECK(Eigen::FullPivLU<Eigen::Matrix3d>(J).rank() == 3);
}

}  // TEST_SUITE
