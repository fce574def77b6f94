#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "delaynf/monomial.hpp"
#include "delaynf/poly.hpp"

namespace delaynf {

// Variable layouts used across the library.
//   center      : (x0; x1, conj x1; ...; xp, conj xp; nu; mu_1..mu_s)  2p+2+s vars
//   radial      : (rho_0, ..., rho_p; mu)                               p+1+s vars
//   delay_plain : (v_0, ..., v_p; mu)                                   p+1+s vars
//   delay_ring  : (v_0, w_0, ..., v_p, w_p; mu)                         2p+2+s vars
// Total degree always counts state variables, nu and mu jointly.
enum class Layout { center, radial, delay_plain, delay_ring };

enum class Flavor { full, mu_independent, vanishing_at_mu0, nu_independent };

std::string to_string(Layout layout);
std::string to_string(Flavor flavor);

struct SpaceDesc {
  int p = 1;
  int s = 0;
  int degree = 2;
  int components = 1;
  Flavor flavor = Flavor::full;
  Layout layout = Layout::center;
  // Number of delay slots for the delay layouts; 0 means p+1.
  int slots = 0;

  int nvars() const;
  int state_vars() const { return nvars() - s; }
  // Index of nu, or -1 when the layout has none.
  int nu_index() const;
  int slot_count() const { return slots > 0 ? slots : p + 1; }

  // Throws PreconditionError on inconsistent sizes.
  void validate() const;
  // True when m is admissible for the flavor.
  bool admits(const Monomial& m) const;

  Poly zero() const { return Poly(nvars(), components, s); }
};

struct BasisElement {
  int component = 0;
  Monomial monomial;
};

// Deterministic, duplicate-free, exhaustive enumeration: component-major,
// monomials in GradedLex order.
std::vector<BasisElement> enumerate_basis(const SpaceDesc& space);

// Enumerated basis with index lookup and coefficient-vector conversion.
class Basis {
 public:
  Basis() = default;
  explicit Basis(const SpaceDesc& space);
  Basis(const SpaceDesc& space, std::vector<BasisElement> elements);

  const SpaceDesc& space() const { return space_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const BasisElement& operator[](int i) const { return elements_[static_cast<std::size_t>(i)]; }
  const std::vector<BasisElement>& elements() const { return elements_; }

  // -1 if the pair is not in the basis.
  int index_of(int component, const Monomial& m) const;

  // Coefficient vector of f. Throws if f has a term outside the basis.
  Eigen::VectorXcd to_vector(const Poly& f) const;
  Poly from_vector(const Eigen::VectorXcd& v) const;
  // The basis element i as a polynomial.
  Poly element(int i) const;

 private:
  struct Key {
    int component;
    Monomial monomial;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return k.monomial.hash() * 31u + static_cast<std::size_t>(k.component); }
  };

  SpaceDesc space_;
  std::vector<BasisElement> elements_;
  std::unordered_map<Key, int, KeyHash> index_;
};

}  // namespace delaynf
