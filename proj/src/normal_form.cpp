#include "delaynf/normal_form.hpp"

#include <cmath>
#include <map>

#include "delaynf/errors.hpp"
#include "delaynf/homological.hpp"
#include "delaynf/symmetry.hpp"

namespace delaynf {

std::string to_string(NfMode mode) { return mode == NfMode::leading ? "leading" : "ode_reduction"; }

RfdeModel RfdeModel::with_zero_nonlinearity(DelayKernel kernel, std::vector<double> omegas, DelayTuple delays, int s,
                                            int order) {
  RfdeModel m;
  m.kernel = std::move(kernel);
  m.omegas = std::move(omegas);
  m.delays = std::move(delays);
  m.s = s;
  m.order = order;
  const int n = m.delays.size() + s;
  m.eta = Poly(n, 1, s);
  m.xi = Poly(n, 1, s);
  return m;
}

void RfdeModel::validate() const {
  kernel.validate();
  delays.validate(kernel.r);
  if (s < 0) throw PreconditionError("model: s must be >= 0");
  if (order < 2) throw PreconditionError("model: order must be >= 2");
  const int n = delays.size() + s;
  for (const Poly* f : {&eta, &xi}) {
    if (f->nvars() != n || f->ncomponents() != 1 || f->nparams() != s) {
      throw PreconditionError("model: nonlinearity must be scalar in " + std::to_string(delays.size()) +
                              " delay slots and " + std::to_string(s) + " parameters");
    }
  }
  auto mu_degree = [&](const Monomial& m) {
    int d = 0;
    for (int t = 0; t < s; ++t) d += m[delays.size() + t];
    return d;
  };
  for (const auto& [m, c] : eta[0]) {
    if (m.degree() < 2) {
      throw PreconditionError("model: eta term " + m.to_string() + " has degree < 2 (F(0,0)=0, DF(0,0)=0 violated)");
    }
    if (mu_degree(m) > 0) throw PreconditionError("model: eta term " + m.to_string() + " depends on mu");
    if (c.imag() != 0.0) throw PreconditionError("model: eta coefficients must be real");
  }
  for (const auto& [m, c] : xi[0]) {
    if (m.degree() < 2) throw PreconditionError("model: xi term " + m.to_string() + " has degree < 2");
    if (mu_degree(m) == 0) throw PreconditionError("model: xi term " + m.to_string() + " does not vanish at mu = 0");
    if (c.imag() != 0.0) throw PreconditionError("model: xi coefficients must be real");
  }
}

namespace {

// Plain layout (v_1..v_d, mu) -> ring layout (v_1, w_1, ..., v_d, w_d, mu) with w = 0.
Poly embed_ring(const Poly& h, int d) {
  const int s = h.nparams();
  Poly out(2 * d + s, 1, s);
  for (const auto& [m, c] : h[0]) {
    Monomial r(2 * d + s);
    for (int i = 0; i < d; ++i) r.set(2 * i, m[i]);
    for (int t = 0; t < s; ++t) r.set(2 * d + t, m[d + t]);
    out.add(0, r, c);
  }
  return out;
}

}  // namespace

OdeJet reduce_to_ode(const RfdeModel& model, const SpectralData& data) {
  model.validate();
  if (data.omegas != model.omegas) throw PreconditionError("reduce_to_ode: spectral data belongs to other frequencies");
  const int p = static_cast<int>(model.omegas.size());
  OdeJet jet;
  jet.p = p;
  jet.s = model.s;
  jet.omegas = model.omegas;
  jet.order = model.order;
  const Poly ring = embed_ring(model.nonlinearity().truncated(model.order), model.delays.size());
  jet.f = lift(ring, data, model.delays, LiftFlavor::ring);
  jet.h.assign(static_cast<std::size_t>(model.order + 1), jet.f.zero_like());
  jet.q = jet.h;
  for (int j = 2; j <= model.order; ++j) {
    auto [hj, qj] = split_parameter(jet.f.homogeneous_part(j));
    jet.h[static_cast<std::size_t>(j)] = std::move(hj);
    jet.q[static_cast<std::size_t>(j)] = std::move(qj);
  }
  return jet;
}

Poly transform_field(const Poly& F, const Poly& U, std::span<const double> omegas, int order) {
  const int p = static_cast<int>(omegas.size());
  const int nx = 2 * p + 1;
  const int n = F.nvars();
  const int s = F.nparams();
  if (!F.same_shape(U) || F.ncomponents() != nx) throw PreconditionError("transform_field: shape mismatch");

  // y_i + U_i(y) for the state variables.
  std::vector<Poly> shifted;
  for (int i = 0; i < nx; ++i) {
    Poly v = U.component_poly(i);
    v.add(0, Monomial::unit(n, i), 1.0);
    shifted.push_back(std::move(v));
  }

  std::map<Monomial, Poly, GradedLex> memo;
  {
    Poly one(n, 1, s);
    one.add(0, Monomial(n), 1.0);
    memo.emplace(Monomial(n), std::move(one));
  }
  auto value = [&](auto&& self, const Monomial& m) -> const Poly& {
    if (auto it = memo.find(m); it != memo.end()) return it->second;
    int last = nx - 1;
    while (m[last] == 0) --last;
    const Poly& prev = self(self, m / Monomial::unit(n, last));
    Poly next = multiply(prev, shifted[static_cast<std::size_t>(last)], order);
    return memo.emplace(m, std::move(next)).first->second;
  };

  Poly W = F.zero_like();
  for (int k = 0; k < nx; ++k) {
    for (const auto& [m, c] : F[k]) {
      Monomial state(n);
      Monomial rest(n);
      for (int i = 0; i < n; ++i) (i < nx ? state : rest).set(i, m[i]);
      const int budget = order - rest.degree();
      for (const auto& [mv, cv] : value(value, state)[0]) {
        if (mv.degree() <= budget) W.add(k, mv * rest, c * cv);
      }
    }
  }
  W -= apply_homological(U, omegas);

  // (I + DU)^{-1} W = W - DU W + DU (DU W) - ...
  std::vector<std::vector<Poly>> dU(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) {
    const Poly d = derivative(U, i);
    for (int k = 0; k < nx; ++k) dU[static_cast<std::size_t>(i)].push_back(d.component_poly(k));
  }
  Poly result = W;
  Poly term = W;
  for (int iter = 0; iter < order && !term.is_zero(); ++iter) {
    Poly next = F.zero_like();
    for (int i = 0; i < nx; ++i) {
      const Poly ti = term.component_poly(i);
      if (ti.is_zero()) continue;
      for (int k = 0; k < nx; ++k) {
        const Poly& dki = dU[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        if (dki.is_zero()) continue;
        const Poly prod = multiply(dki, ti, order);
        for (const auto& [m, c] : prod[0]) next.add(k, m, -c);
      }
    }
    term = std::move(next);
    result += term;
  }
  return result.truncated(order);
}

Poly NormalFormOutput::equivariant_field() const {
  Poly f(2 * p + 2 + s, 2 * p + 1, s);
  for (const auto& gj : g) {
    if (gj.nvars() == f.nvars()) f += gj;
  }
  return f;
}

NormalFormOutput normal_form(const OdeJet& jet, int order, NfMode mode) {
  if (order < 2) throw PreconditionError("normal_form: order must be >= 2");
  NormalFormOutput out;
  out.mode = mode;
  out.order = order;
  out.p = jet.p;
  out.s = jet.s;
  out.omegas = jet.omegas;
  const Poly zero = jet.f.zero_like();
  out.g.assign(static_cast<std::size_t>(order + 1), zero);
  out.U = out.g;
  out.Y = out.g;
  out.Z = out.g;
  out.homological_residual.assign(static_cast<std::size_t>(order + 1), 0.0);

  Poly F = jet.f.truncated(order);
  for (int j = 2; j <= order; ++j) {
    const auto idx = static_cast<std::size_t>(j);
    const Poly original = jet.f.homogeneous_part(j);
    const Poly Fj = mode == NfMode::leading ? original : F.homogeneous_part(j);
    auto [y, z] = split_parameter(Fj - original);
    out.Y[idx] = std::move(y);
    out.Z[idx] = std::move(z);
    out.g[idx] = project_A_ring(Fj);
    const HomologicalSolution sol = solve_homological(Fj - out.g[idx], jet.omegas);
    out.U[idx] = sol.h;
    out.homological_residual[idx] = sol.residual;
    if (mode == NfMode::leading) continue;
    if (j < order && !sol.h.is_zero()) F = transform_field(F, sol.h, jet.omegas, order);
    F = F - F.homogeneous_part(j) + out.g[idx];
    const RealityReport reality = check_reality(F, 1e-9);
    if (!reality.ok) {
      const auto& v = *reality.first_violation;
      throw NumericalError("normal_form: reality lost at degree " + std::to_string(j) + " (component " +
                           std::to_string(v.component) + ", monomial " + v.monomial.to_string() + ")");
    }
  }
  const PolarSystem polar = polar_decouple(out);
  out.radial = polar.radial;
  out.angular = polar.angular;
  return out;
}

PolarSystem polar_decouple(const NormalFormOutput& nf) {
  PolarSystem ps;
  ps.omegas = nf.omegas;
  const Poly g = nf.equivariant_field();
  ps.radial = radial_project(g);
  ps.angular = angular_extract(g);
  return ps;
}

GuckenheimerCoefficients guckenheimer_example(const std::array<double, 7>& A, const DelayTuple& tau,
                                              const SpectralData& data, const DelayKernel& kernel, NfMode mode) {
  if (data.omegas.size() != 1) throw PreconditionError("guckenheimer_example: needs p = 1 spectral data");
  if (tau.size() != 2) throw PreconditionError("guckenheimer_example: needs two delays");
  RfdeModel model = RfdeModel::with_zero_nonlinearity(kernel, data.omegas, tau, 0, 3);
  const Monomial exps[7] = {{2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}};
  for (int i = 0; i < 7; ++i) model.eta.add(0, exps[i], A[static_cast<std::size_t>(i)]);

  GuckenheimerCoefficients out;
  out.A = A;
  out.nf = normal_form(reduce_to_ode(model, data), 3, mode);
  const Poly& r = out.nf.radial;
  auto c = [&](int comp, std::initializer_list<int> e) { return r.coeff(comp, Monomial(e)).real(); };
  out.a1 = c(0, {2, 0});
  out.a2 = c(0, {0, 2});
  out.a3 = c(0, {3, 0});
  out.a4 = c(0, {1, 2});
  out.b1 = c(1, {1, 1});
  out.b2 = c(1, {0, 3});
  out.b3 = c(1, {2, 1});
  return out;
}

Poly radial_jet(const RfdeModel& model, const SpectralData& data, NfMode mode) {
  return normal_form(reduce_to_ode(model, data), model.order, mode).radial;
}

}  // namespace delaynf
