#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "delaynf/poly.hpp"
#include "delaynf/space.hpp"

namespace delaynf {

// L f = D_x f B x - B f + nu df/dx0 on a field with 2p+1 components, where
// B = diag(0, i w_1, -i w_1, ...). Exact on monomials: the B part is the
// diagonal i<delta, omega>, the nu part shifts x0 -> nu with weight a0.
Poly apply_homological(const Poly& f, std::span<const double> omegas);

// The operator of the extended system on 2p+2+s components:
//   x  row: L f^x - f^nu e_0
//   nu row: D f^nu (B x + nu e_0),  mu rows: D f^mu (B x + nu e_0).
Poly apply_homological_full(const Poly& f, std::span<const double> omegas);

struct HomologicalMatrix {
  Basis basis;
  Eigen::SparseMatrix<cplx> matrix;
};

// Sparse matrix of L on the full degree-`degree` space with 2p+1 components.
HomologicalMatrix homological_matrix(std::span<const double> omegas, int s, int degree);

struct HomologicalSolution {
  Poly h;
  // ||L h - g|| / ||g|| (0 when g = 0).
  double residual = 0.0;
};

// Minimal-norm h with L h = g. Requires project_A_ring(g) = 0 to 1e-10; the
// system splits into blocks of fixed (component, x-part without x0, a0 + c),
// each solved by SVD with cutoff 1e-12 * sigma_max.
HomologicalSolution solve_homological(const Poly& g, std::span<const double> omegas);

struct SplittingCheck {
  std::string name;
  int dim_space = 0;
  // Dimension of the equivariant nu-free subspace from the basis enumeration.
  int dim_equivariant = 0;
  int dim_range_A = 0;
  int dim_range_L = 0;
  bool range_A_matches = false;
  bool dims_add_up = false;
  bool direct_sum = false;
  bool range_L_in_ker_A = false;
  bool A_is_projection = false;
  bool ok() const { return range_A_matches && dims_add_up && direct_sum && range_L_in_ker_A && A_is_projection; }
};

struct SplittingReport {
  int p = 0;
  int s = 0;
  int degree = 0;
  SplittingCheck whole;
  // With s > 0: restriction to mu-free fields and to fields vanishing at mu = 0.
  std::vector<SplittingCheck> restrictions;
  bool ok() const;
};

SplittingReport verify_splitting(std::span<const double> omegas, int s, int degree);

}  // namespace delaynf
