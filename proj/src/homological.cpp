#include "delaynf/homological.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "delaynf/errors.hpp"
#include "delaynf/linalg.hpp"
#include "delaynf/symmetry.hpp"

namespace delaynf {

namespace {

void require_center_field(const Poly& f, std::span<const double> omegas, int components) {
  const auto shape = center_shape(f);
  if (shape.p != static_cast<int>(omegas.size())) {
    throw PreconditionError("homological operator: field has p=" + std::to_string(shape.p) + " but " +
                            std::to_string(omegas.size()) + " frequencies were given");
  }
  if (f.ncomponents() != components) {
    throw PreconditionError("homological operator: expected " + std::to_string(components) + " components, got " +
                            std::to_string(f.ncomponents()));
  }
}

// D g (B x + nu e_0) for a scalar g in the center variables.
Poly flow_derivative(const Poly& g, std::span<const double> omegas) {
  const int p = static_cast<int>(omegas.size());
  const int nu = 2 * p + 1;
  Poly r = g.zero_like();
  for (const auto& [m, c] : g[0]) {
    const double phi = resonance_frequency(omegas, 0, m);
    if (phi != 0.0) r.add(0, m, c * cplx{0.0, phi});
    if (m[0] > 0) {
      Monomial shifted = m;
      shifted.set(0, m[0] - 1);
      shifted.set(nu, m[nu] + 1);
      r.add(0, shifted, c * static_cast<double>(m[0]));
    }
  }
  return r;
}

}  // namespace

Poly apply_homological(const Poly& f, std::span<const double> omegas) {
  const int p = static_cast<int>(omegas.size());
  require_center_field(f, omegas, 2 * p + 1);
  const int nu = 2 * p + 1;
  Poly r = f.zero_like();
  for (int k = 0; k < f.ncomponents(); ++k) {
    for (const auto& [m, c] : f[k]) {
      const double phi = resonance_frequency(omegas, k, m);
      if (phi != 0.0) r.add(k, m, c * cplx{0.0, phi});
      if (m[0] > 0) {
        Monomial shifted = m;
        shifted.set(0, m[0] - 1);
        shifted.set(nu, m[nu] + 1);
        r.add(k, shifted, c * static_cast<double>(m[0]));
      }
    }
  }
  return r;
}

Poly apply_homological_full(const Poly& f, std::span<const double> omegas) {
  const int p = static_cast<int>(omegas.size());
  require_center_field(f, omegas, 2 * p + 2 + f.nparams());
  const int nu = 2 * p + 1;
  Poly x_part(f.nvars(), 2 * p + 1, f.nparams());
  for (int k = 0; k <= 2 * p; ++k) {
    for (const auto& [m, c] : f[k]) x_part.add(k, m, c);
  }
  const Poly lx = apply_homological(x_part, omegas);
  Poly r = f.zero_like();
  for (int k = 0; k <= 2 * p; ++k) {
    for (const auto& [m, c] : lx[k]) r.add(k, m, c);
  }
  for (const auto& [m, c] : f[nu]) r.add(0, m, -c);
  for (int k = nu; k < f.ncomponents(); ++k) {
    const Poly d = flow_derivative(f.component_poly(k), omegas);
    for (const auto& [m, c] : d[0]) r.add(k, m, c);
  }
  return r;
}

HomologicalMatrix homological_matrix(std::span<const double> omegas, int s, int degree) {
  const int p = static_cast<int>(omegas.size());
  SpaceDesc space{.p = p, .s = s, .degree = degree, .components = 2 * p + 1};
  HomologicalMatrix out{Basis(space), {}};
  const Basis& basis = out.basis;
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (int col = 0; col < basis.size(); ++col) {
    const Poly image = apply_homological(basis.element(col), omegas);
    for (int k = 0; k < image.ncomponents(); ++k) {
      for (const auto& [m, c] : image[k]) triplets.emplace_back(basis.index_of(k, m), col, c);
    }
  }
  out.matrix.resize(basis.size(), basis.size());
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

namespace {

// Invariant part of a monomial under the nu-shift: exponents with a0 and c cleared.
struct BlockKey {
  int component;
  Monomial rest;
  int height;  // a0 + c
  bool operator<(const BlockKey& o) const {
    if (component != o.component) return component < o.component;
    if (height != o.height) return height < o.height;
    return GradedLex{}(rest, o.rest);
  }
};

struct Block {
  double phi = 0.0;
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd rhs;
};

Monomial block_member(const BlockKey& key, int a0, int nu) {
  Monomial m = key.rest;
  m.set(0, a0);
  m.set(nu, key.height - a0);
  return m;
}

}  // namespace

HomologicalSolution solve_homological(const Poly& g, std::span<const double> omegas) {
  const int p = static_cast<int>(omegas.size());
  require_center_field(g, omegas, 2 * p + 1);
  const int nu = 2 * p + 1;
  const double gnorm = g.norm();

  const Poly remainder = project_A_ring(g);
  if (remainder.norm() > 1e-10 * std::max(1.0, gnorm)) {
    throw PreconditionError("solve_homological: right-hand side is not in ker A (remainder norm " +
                            std::to_string(remainder.norm()) + ", first term " + remainder.pruned(1e-10).to_string() +
                            ")");
  }

  // Group terms into blocks; inside a block the unknowns are indexed by a0.
  std::map<BlockKey, Block> blocks;
  for (int k = 0; k < g.ncomponents(); ++k) {
    for (const auto& [m, c] : g[k]) {
      Monomial rest = m;
      rest.set(0, 0);
      rest.set(nu, 0);
      const BlockKey key{k, rest, m[0] + m[nu]};
      auto [it, inserted] = blocks.try_emplace(key);
      Block& b = it->second;
      if (inserted) {
        const int n = key.height + 1;
        b.phi = resonance_frequency(omegas, k, m);
        b.matrix = Eigen::MatrixXcd::Zero(n, n);
        b.rhs = Eigen::VectorXcd::Zero(n);
        for (int a0 = 0; a0 < n; ++a0) {
          b.matrix(a0, a0) = cplx{0.0, b.phi};
          if (a0 > 0) b.matrix(a0 - 1, a0) = static_cast<double>(a0);
        }
      }
      b.rhs(m[0]) += c;
    }
  }

  double sigma_max = 0.0;
  for (const auto& [key, b] : blocks) {
    const Eigen::VectorXd sv = linalg::singular_values(b.matrix);
    if (sv.size() > 0) sigma_max = std::max(sigma_max, sv(0));
  }
  const double cutoff = 1e-12 * sigma_max;

  HomologicalSolution out{g.zero_like(), 0.0};
  for (const auto& [key, b] : blocks) {
    const Eigen::VectorXcd x = linalg::min_norm_solve(b.matrix, b.rhs, cutoff);
    for (Eigen::Index a0 = 0; a0 < x.size(); ++a0) {
      if (x(a0) != cplx{}) out.h.add(key.component, block_member(key, static_cast<int>(a0), nu), x(a0));
    }
  }

  if (gnorm > 0.0) {
    out.residual = distance(apply_homological(out.h, omegas), g) / gnorm;
    if (!(out.residual <= 1e-9)) {
      throw NumericalError("solve_homological: relative residual " + std::to_string(out.residual) +
                           " exceeds 1e-9 (rank-deficient block outside ker A)");
    }
  }
  return out;
}

namespace {

int mu_degree(const Monomial& m, int nvars, int s) {
  int d = 0;
  for (int i = nvars - s; i < nvars; ++i) d += m[i];
  return d;
}

SplittingCheck check_space(std::span<const double> omegas, int s, int degree, Flavor flavor, std::string name,
                           const std::vector<Poly>& equivariant) {
  const int p = static_cast<int>(omegas.size());
  SpaceDesc space{.p = p, .s = s, .degree = degree, .components = 2 * p + 1, .flavor = flavor};
  const Basis basis(space);
  const int n = basis.size();
  const int nvars = space.nvars();
  SplittingCheck check;
  check.name = std::move(name);
  check.dim_space = n;

  for (const auto& e : equivariant) {
    bool in_space = true;
    for (int k = 0; k < e.ncomponents() && in_space; ++k) {
      for (const auto& [m, c] : e[k]) {
        const int md = mu_degree(m, nvars, s);
        if ((flavor == Flavor::mu_independent && md != 0) || (flavor == Flavor::vanishing_at_mu0 && md == 0)) {
          in_space = false;
          break;
        }
      }
    }
    check.dim_equivariant += in_space ? 1 : 0;
  }

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    const Poly e = basis.element(col);
    A.col(col) = basis.to_vector(project_A_ring(e));
    L.col(col) = basis.to_vector(apply_homological(e, omegas));
  }

  check.dim_range_A = linalg::numerical_rank(A, 1e-10);
  check.A_is_projection = (A * A - A).norm() == 0.0;
  check.range_A_matches = check.dim_range_A == check.dim_equivariant;

  if (n > 0) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(L, Eigen::ComputeThinU);
    const Eigen::VectorXd& sigma = svd.singularValues();
    check.dim_range_L = sigma.size() && sigma(0) > 0.0 ? linalg::count_above(sigma, 1e-10 * sigma(0)) : 0;
    const double lnorm = sigma.size() ? sigma(0) : 0.0;
    check.range_L_in_ker_A = (A * L).norm() <= 1e-12 * std::max(1.0, lnorm);

    // Stack range A (its nonzero columns are unit vectors) with an orthonormal basis of range L.
    Eigen::MatrixXcd stacked(n, check.dim_range_A + check.dim_range_L);
    int c = 0;
    for (int col = 0; col < n; ++col) {
      if (A.col(col).norm() > 0.0) stacked.col(c++) = A.col(col);
    }
    stacked.rightCols(check.dim_range_L) = svd.matrixU().leftCols(check.dim_range_L);
    check.direct_sum = linalg::numerical_rank(stacked, 1e-10) == check.dim_range_A + check.dim_range_L;
  } else {
    check.range_L_in_ker_A = true;
    check.direct_sum = true;
  }
  check.dims_add_up = check.dim_range_A + check.dim_range_L == n;
  return check;
}

}  // namespace

bool SplittingReport::ok() const {
  return whole.ok() && std::all_of(restrictions.begin(), restrictions.end(), [](const auto& r) { return r.ok(); });
}

SplittingReport verify_splitting(std::span<const double> omegas, int s, int degree) {
  const int p = static_cast<int>(omegas.size());
  if (p < 1) throw PreconditionError("verify_splitting: need at least one frequency");
  const auto equivariant = equivariant_basis(p, s, degree, EquivariantKind::torus_nu_independent);
  SplittingReport report{p, s, degree, check_space(omegas, s, degree, Flavor::full, "full", equivariant), {}};
  if (s > 0) {
    report.restrictions.push_back(
        check_space(omegas, s, degree, Flavor::mu_independent, "mu_independent", equivariant));
    report.restrictions.push_back(
        check_space(omegas, s, degree, Flavor::vanishing_at_mu0, "vanishing_at_mu0", equivariant));
  }
  return report;
}

}  // namespace delaynf
