#include "delaynf/symmetry.hpp"

#include <cmath>
#include <numbers>

#include "delaynf/errors.hpp"
#include "delaynf/linalg.hpp"

namespace delaynf {

CenterShape center_shape(const Poly& f) {
  const int s = f.nparams();
  const int twice_p = f.nvars() - s - 2;
  if (twice_p < 0 || twice_p % 2 != 0) {
    throw PreconditionError("expected a polynomial in the (x, nu, mu) layout, got " + std::to_string(f.nvars()) +
                            " variables with " + std::to_string(s) + " parameters");
  }
  return {twice_p / 2, s};
}

std::vector<int> component_weight(int p, int k) {
  std::vector<int> w(static_cast<std::size_t>(p), 0);
  if (k >= 1 && k <= 2 * p) {
    const int j = (k + 1) / 2;
    w[static_cast<std::size_t>(j - 1)] = (k % 2 == 1) ? 1 : -1;
  }
  return w;
}

std::vector<int> resonance_defect(int p, int k, const Monomial& m) {
  std::vector<int> d = component_weight(p, k);
  for (int j = 1; j <= p; ++j) {
    auto& dj = d[static_cast<std::size_t>(j - 1)];
    dj = (m[2 * j - 1] - m[2 * j]) - dj;
  }
  return d;
}

bool is_resonant(int p, int k, const Monomial& m) {
  // Inline form of resonance_defect == 0 without allocating.
  for (int j = 1; j <= p; ++j) {
    int w = 0;
    if (k == 2 * j - 1) w = 1;
    if (k == 2 * j) w = -1;
    if (m[2 * j - 1] - m[2 * j] != w) return false;
  }
  return true;
}

double resonance_frequency(std::span<const double> omegas, int k, const Monomial& m) {
  const int p = static_cast<int>(omegas.size());
  const auto d = resonance_defect(p, k, m);
  double phi = 0.0;
  for (int j = 0; j < p; ++j) phi += d[static_cast<std::size_t>(j)] * omegas[static_cast<std::size_t>(j)];
  return phi;
}

Poly project_A_ring(const Poly& f) {
  const auto [p, s] = center_shape(f);
  const int nu = 2 * p + 1;
  Poly r = f.zero_like();
  for (int k = 0; k < f.ncomponents(); ++k) {
    for (const auto& [m, c] : f[k]) {
      if (m[nu] == 0 && is_resonant(p, k, m)) r.add(k, m, c);
    }
  }
  return r;
}

Poly project_A(const Poly& f) {
  const auto [p, s] = center_shape(f);
  const int nu = 2 * p + 1;
  Poly r = f.zero_like();
  for (int k = 0; k < f.ncomponents(); ++k) {
    for (const auto& [m, c] : f[k]) {
      if (m[nu] != 0) throw PreconditionError("project_A: input depends on nu (term " + m.to_string() + ")");
      if (is_resonant(p, k, m)) r.add(k, m, c);
    }
  }
  return r;
}

namespace {

std::vector<Poly> torus_real_basis(int p, int s, int degree) {
  SpaceDesc space{.p = p, .s = s, .degree = degree, .components = 2 * p + 1, .flavor = Flavor::nu_independent};
  const auto elements = enumerate_basis(space);
  std::vector<Poly> out;
  const cplx i1{0.0, 1.0};
  for (const auto& e : elements) {
    const int k = e.component;
    if (!is_resonant(p, k, e.monomial)) continue;
    if (k == 0) {
      Poly f = space.zero();
      f.add(0, e.monomial, 1.0);
      out.push_back(std::move(f));
    } else if (k % 2 == 1) {
      // x_j row; the conj x_j row is its mirror image.
      const Monomial mc = conjugate_monomial(e.monomial, p);
      Poly re = space.zero();
      re.add(k, e.monomial, 1.0);
      re.add(k + 1, mc, 1.0);
      Poly im = space.zero();
      im.add(k, e.monomial, i1);
      im.add(k + 1, mc, -i1);
      out.push_back(std::move(re));
      out.push_back(std::move(im));
    }
  }
  return out;
}

std::vector<Poly> gamma_basis(int p, int s, int degree) {
  const int ncomp = 2 * p + 2 + s;
  const int nu = 2 * p + 1;
  SpaceDesc full{.p = p, .s = s, .degree = degree, .components = ncomp};
  const Basis codomain(full);

  // Torus-equivariant candidates on all components (nu and mu rows have weight 0).
  std::vector<BasisElement> candidates;
  for (const auto& e : codomain.elements()) {
    if (is_resonant(p, e.component, e.monomial)) candidates.push_back(e);
  }
  const Basis domain(full, candidates);

  // Infinitesimal commutation with w -> w + Theta * x0 * e_nu:
  //   (C f)_nu = f_0 - x0 d f_nu / d nu,   (C f)_k = -x0 d f_k / d nu  (k != nu).
  const Monomial x0 = Monomial::unit(full.nvars(), 0);
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(codomain.size(), domain.size());
  for (int col = 0; col < domain.size(); ++col) {
    const Poly f = domain.element(col);
    Poly image = full.zero();
    for (const auto& [m, c] : f[0]) image.add(nu, m, c);
    const Poly dnu = times_monomial(derivative(f, nu), x0);
    image -= dnu;
    C.col(col) = codomain.to_vector(image);
  }

  std::vector<Poly> out;
  Eigen::MatrixXcd kernel;
  if (C.rows() == 0 || C.cols() == 0) {
    kernel = Eigen::MatrixXcd::Identity(domain.size(), domain.size());
  } else {
    kernel = linalg::null_space(C, 1e-10);
  }
  for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
    out.push_back(domain.from_vector(kernel.col(j)).pruned(1e-14));
  }
  return out;
}

}  // namespace

std::vector<Poly> equivariant_basis(int p, int s, int degree, EquivariantKind kind) {
  if (p < 1) throw PreconditionError("equivariant_basis: p must be >= 1");
  if (s < 0) throw PreconditionError("equivariant_basis: s must be >= 0");
  if (degree < 2) throw PreconditionError("equivariant_basis: degree must be >= 2");
  return kind == EquivariantKind::torus_nu_independent ? torus_real_basis(p, s, degree) : gamma_basis(p, s, degree);
}

bool is_radially_equivariant(int p, int component, const Monomial& m) {
  for (int j = 1; j <= p; ++j) {
    const bool odd = m[j] % 2 == 1;
    if (odd != (j == component)) return false;
  }
  return true;
}

SpaceDesc radial_space(int p, int s, int degree, Flavor flavor) {
  return SpaceDesc{.p = p, .s = s, .degree = degree, .components = p + 1, .flavor = flavor, .layout = Layout::radial};
}

Basis radial_basis(int p, int s, int degree, Flavor flavor) {
  const SpaceDesc space = radial_space(p, s, degree, flavor);
  std::vector<BasisElement> kept;
  for (const auto& e : enumerate_basis(space)) {
    if (is_radially_equivariant(p, e.component, e.monomial)) kept.push_back(e);
  }
  return Basis(space, std::move(kept));
}

namespace {

// rho exponents: rho_0^{a_0}, rho_j^{a_j + b_j}; parameters copied.
Monomial to_radial(const Monomial& m, int p, int s) {
  Monomial r(p + 1 + s);
  r.set(0, m[0]);
  for (int j = 1; j <= p; ++j) r.set(j, m[2 * j - 1] + m[2 * j]);
  for (int t = 0; t < s; ++t) r.set(p + 1 + t, m[2 * p + 2 + t]);
  return r;
}

void require_equivariant_term(int p, int k, const Monomial& m) {
  if (m[2 * p + 1] != 0 || !is_resonant(p, k, m)) {
    throw PreconditionError("radial projection: term " + m.to_string() + " in component " + std::to_string(k) +
                            " is not torus-equivariant and nu-free");
  }
}

}  // namespace

Poly radial_project(const Poly& f) {
  const auto [p, s] = center_shape(f);
  if (f.ncomponents() != 2 * p + 1) throw PreconditionError("radial projection: expected 2p+1 components");
  Poly r(p + 1 + s, p + 1, s);
  for (int k = 0; k <= 2 * p; ++k) {
    for (const auto& [m, c] : f[k]) {
      require_equivariant_term(p, k, m);
      if (k == 0) {
        r.add(0, to_radial(m, p, s), c.real());
      } else if (k % 2 == 1) {
        r.add((k + 1) / 2, to_radial(m, p, s), c.real());
      }
    }
  }
  return r;
}

Poly angular_extract(const Poly& f) {
  const auto [p, s] = center_shape(f);
  if (f.ncomponents() != 2 * p + 1) throw PreconditionError("angular extraction: expected 2p+1 components");
  Poly r(p + 1 + s, p, s);
  for (int k = 0; k <= 2 * p; ++k) {
    for (const auto& [m, c] : f[k]) {
      require_equivariant_term(p, k, m);
      if (k % 2 == 1) {
        const int j = (k + 1) / 2;
        Monomial rm = to_radial(m, p, s);
        rm.set(j, rm[j] - 1);
        r.add(j - 1, rm, c.imag());
      }
    }
  }
  return r;
}

Poly time_average(const Poly& f, std::span<const double> omegas, double T, int n_steps) {
  const auto [p, s] = center_shape(f);
  if (static_cast<int>(omegas.size()) != p) throw PreconditionError("time_average: need one frequency per Hopf pair");
  if (!(T > 0.0)) throw PreconditionError("time_average: T must be positive");
  const int nu = 2 * p + 1;
  double phi_max = 0.0;
  for (int k = 0; k < f.ncomponents(); ++k) {
    for (const auto& [m, c] : f[k]) {
      if (m[nu] != 0) throw PreconditionError("time_average: input depends on nu");
      phi_max = std::max(phi_max, std::abs(resonance_frequency(omegas, k, m)));
    }
  }
  // At least four samples per period of the fastest phase.
  const double required = 2.0 * T * phi_max / std::numbers::pi;
  if (n_steps < 2 || n_steps < required) {
    throw PreconditionError("time_average: n_steps=" + std::to_string(n_steps) + " under-resolves phase " +
                            std::to_string(phi_max) + " over T=" + std::to_string(T) + " (need >= " +
                            std::to_string(static_cast<long long>(std::ceil(required))) + ")");
  }
  const int n = n_steps % 2 == 0 ? n_steps : n_steps + 1;
  const double h = T / n;

  // The flow multiplies each term by exp(-i phi s); integrate that factor.
  auto average_factor = [&](double phi) {
    cplx sum{};
    for (int i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      sum += w * std::exp(cplx{0.0, -phi * i * h});
    }
    return sum * (h / 3.0) / T;
  };

  Poly r = f.zero_like();
  for (int k = 0; k < f.ncomponents(); ++k) {
    for (const auto& [m, c] : f[k]) {
      const double phi = resonance_frequency(omegas, k, m);
      r.add(k, m, c * average_factor(phi));
    }
  }
  return r;
}

}  // namespace delaynf
