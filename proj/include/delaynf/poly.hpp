#pragma once

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "delaynf/monomial.hpp"

namespace delaynf {

using cplx = std::complex<double>;
using Terms = std::map<Monomial, cplx, GradedLex>;

// Sparse polynomial map with `ncomponents` components in `nvars` variables.
// The last `nparams` variables are unfolding parameters (mu); they pass
// through every linear substitution unchanged. Exact zeros are never stored.
class Poly {
 public:
  Poly() = default;
  Poly(int nvars, int ncomponents, int nparams = 0);

  int nvars() const { return nvars_; }
  int ncomponents() const { return static_cast<int>(comps_.size()); }
  int nparams() const { return nparams_; }

  const Terms& component(int k) const { return comps_.at(static_cast<std::size_t>(k)); }
  const Terms& operator[](int k) const { return component(k); }

  // Accumulates c into the coefficient of m in component k.
  void add(int k, const Monomial& m, cplx c);
  void set(int k, const Monomial& m, cplx c);
  cplx coeff(int k, const Monomial& m) const;

  bool is_zero() const;
  std::size_t term_count() const;
  // -1 for the zero polynomial.
  int max_degree() const;
  int min_degree() const;

  Poly homogeneous_part(int degree) const;
  Poly truncated(int max_degree) const;
  // Drops coefficients with |c| <= tol.
  Poly pruned(double tol) const;
  // Zero polynomial with the same shape.
  Poly zero_like() const { return Poly(nvars_, ncomponents(), nparams_); }
  // Component k as a one-component polynomial.
  Poly component_poly(int k) const;

  // Euclidean norm of the coefficient vector.
  double norm() const;
  double max_abs() const;

  cplx evaluate(int k, std::span<const cplx> point) const;

  Poly& operator+=(const Poly& other);
  Poly& operator-=(const Poly& other);
  Poly& operator*=(cplx scale);

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, cplx s) { return a *= s; }
  friend Poly operator*(cplx s, Poly a) { return a *= s; }

  bool same_shape(const Poly& other) const;
  std::string to_string() const;

 private:
  void check_monomial(const Monomial& m) const;

  int nvars_ = 0;
  int nparams_ = 0;
  std::vector<Terms> comps_;
};

// Product of two one-component polynomials; terms of degree > max_degree are
// dropped when max_degree >= 0.
Poly multiply(const Poly& a, const Poly& b, int max_degree = -1);

// Every term of f multiplied by the monomial m.
Poly times_monomial(const Poly& f, const Monomial& m);

// Partial derivative with respect to variable `var`, componentwise.
Poly derivative(const Poly& f, int var);

// ||a - b||_2 over coefficients.
double distance(const Poly& a, const Poly& b);

// Linear substitution f(M * y, mu). `f` has M.rows() + nparams variables, the
// result has M.cols() + nparams variables. Coefficients are exact up to
// floating round-off; degrees are preserved.
Poly compose_linear(const Poly& f, const Eigen::MatrixXcd& M);

// Splits f = h + q with h collecting the mu-free monomials and q the rest.
std::pair<Poly, Poly> split_parameter(const Poly& f);

struct RealityViolation {
  int component = 0;
  Monomial monomial;
  cplx expected;
  cplx actual;
};

struct RealityReport {
  bool ok = true;
  std::optional<RealityViolation> first_violation;
};

// Audits the reality involution of a vector field written in the mixed
// complex coordinates (x0; x1, conj x1; ...; nu; mu). Accepts 2p+1
// components (center field) or 2p+2+s components (extended field).
RealityReport check_reality(const Poly& f, double tol = 1e-12);

// Swaps the exponents of each conjugate pair (x_j, conj x_j).
Monomial conjugate_monomial(const Monomial& m, int p);

}  // namespace delaynf
