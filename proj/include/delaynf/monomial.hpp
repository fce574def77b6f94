#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace delaynf {

inline constexpr int kMaxVars = 24;
inline constexpr int kMaxExponent = 255;

// Exponent vector of a monomial. Fixed capacity so that products and hashes
// never allocate; the active length is nvars().
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int nvars);
  Monomial(std::initializer_list<int> exponents);
  explicit Monomial(std::span<const int> exponents);

  static Monomial unit(int nvars, int var);

  int nvars() const { return n_; }
  int degree() const { return degree_; }
  int operator[](int i) const { return e_[static_cast<std::size_t>(i)]; }
  void set(int i, int exponent);

  std::vector<int> exponents() const;

  // Product of monomials: exponentwise sum.
  Monomial operator*(const Monomial& other) const;
  bool divisible_by(const Monomial& other) const;
  // Exponentwise difference; requires divisible_by(other).
  Monomial operator/(const Monomial& other) const;

  // Keeps exponents [begin, end) in a monomial of (end - begin) variables.
  Monomial slice(int begin, int end) const;
  // Concatenates two exponent vectors.
  Monomial append(const Monomial& tail) const;

  bool operator==(const Monomial& other) const = default;

  std::size_t hash() const;
  std::string to_string() const;

 private:
  std::array<std::uint8_t, kMaxVars> e_{};
  std::uint8_t n_ = 0;
  std::uint16_t degree_ = 0;
};

// Graded lexicographic order: lower total degree first; within one degree the
// exponent vector that is lexicographically larger comes first (x0^2 before
// x0*x1 before x1^2). Monomials with fewer variables sort first.
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

// All monomials of exactly `degree` in `nvars` variables, in GradedLex order.
std::vector<Monomial> monomials_of_degree(int nvars, int degree);

// Binomial coefficient as a 64-bit integer (small arguments only).
std::uint64_t binomial(int n, int k);

}  // namespace delaynf
