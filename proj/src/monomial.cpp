#include "delaynf/monomial.hpp"

#include <sstream>

#include "delaynf/errors.hpp"

namespace delaynf {

Monomial::Monomial(int nvars) {
  if (nvars < 0 || nvars > kMaxVars) {
    throw PreconditionError("monomial: variable count " + std::to_string(nvars) +
                            " outside [0, " + std::to_string(kMaxVars) + "]");
  }
  n_ = static_cast<std::uint8_t>(nvars);
}

Monomial::Monomial(std::initializer_list<int> exponents)
    : Monomial(std::span<const int>(exponents.begin(), exponents.size())) {}

Monomial::Monomial(std::span<const int> exponents)
    : Monomial(static_cast<int>(exponents.size())) {
  for (int i = 0; i < n_; ++i) set(i, exponents[static_cast<std::size_t>(i)]);
}

Monomial Monomial::unit(int nvars, int var) {
  Monomial m(nvars);
  m.set(var, 1);
  return m;
}

void Monomial::set(int i, int exponent) {
  if (i < 0 || i >= n_) throw PreconditionError("monomial: variable index out of range");
  if (exponent < 0 || exponent > kMaxExponent) {
    throw PreconditionError("monomial: exponent " + std::to_string(exponent) + " out of range");
  }
  auto& slot = e_[static_cast<std::size_t>(i)];
  degree_ = static_cast<std::uint16_t>(degree_ - slot + exponent);
  slot = static_cast<std::uint8_t>(exponent);
}

std::vector<int> Monomial::exponents() const {
  return std::vector<int>(e_.begin(), e_.begin() + n_);
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (other.n_ != n_) throw PreconditionError("monomial product: variable count mismatch");
  Monomial r = *this;
  for (int i = 0; i < n_; ++i) {
    const int e = e_[static_cast<std::size_t>(i)] + other.e_[static_cast<std::size_t>(i)];
    if (e > kMaxExponent) throw PreconditionError("monomial product: exponent overflow");
    r.e_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(e);
  }
  r.degree_ = static_cast<std::uint16_t>(degree_ + other.degree_);
  return r;
}

bool Monomial::divisible_by(const Monomial& other) const {
  if (other.n_ != n_) return false;
  for (int i = 0; i < n_; ++i) {
    if (e_[static_cast<std::size_t>(i)] < other.e_[static_cast<std::size_t>(i)]) return false;
  }
  return true;
}

Monomial Monomial::operator/(const Monomial& other) const {
  if (!divisible_by(other)) throw PreconditionError("monomial quotient: not divisible");
  Monomial r = *this;
  for (int i = 0; i < n_; ++i) {
    r.e_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(
        e_[static_cast<std::size_t>(i)] - other.e_[static_cast<std::size_t>(i)]);
  }
  r.degree_ = static_cast<std::uint16_t>(degree_ - other.degree_);
  return r;
}

Monomial Monomial::slice(int begin, int end) const {
  if (begin < 0 || end > n_ || begin > end) throw PreconditionError("monomial slice out of range");
  Monomial r(end - begin);
  for (int i = begin; i < end; ++i) r.set(i - begin, (*this)[i]);
  return r;
}

Monomial Monomial::append(const Monomial& tail) const {
  Monomial r(n_ + tail.n_);
  for (int i = 0; i < n_; ++i) r.set(i, (*this)[i]);
  for (int i = 0; i < tail.n_; ++i) r.set(n_ + i, tail[i]);
  return r;
}

std::size_t Monomial::hash() const {
  // FNV-1a over the active bytes.
  std::size_t h = 1469598103934665603ULL;
  h = (h ^ n_) * 1099511628211ULL;
  for (int i = 0; i < n_; ++i) h = (h ^ e_[static_cast<std::size_t>(i)]) * 1099511628211ULL;
  return h;
}

std::string Monomial::to_string() const {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < n_; ++i) {
    if (i) os << ',';
    os << static_cast<int>(e_[static_cast<std::size_t>(i)]);
  }
  os << ']';
  return os.str();
}

bool GradedLex::operator()(const Monomial& a, const Monomial& b) const {
  if (a.nvars() != b.nvars()) return a.nvars() < b.nvars();
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  for (int i = 0; i < a.nvars(); ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

namespace {

void fill_monomials(int var, int remaining, Monomial& current, std::vector<Monomial>& out) {
  const int n = current.nvars();
  if (var == n - 1) {
    current.set(var, remaining);
    out.push_back(current);
    current.set(var, 0);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current.set(var, e);
    fill_monomials(var + 1, remaining - e, current, out);
  }
  current.set(var, 0);
}

}  // namespace

std::vector<Monomial> monomials_of_degree(int nvars, int degree) {
  if (nvars < 0 || degree < 0) throw PreconditionError("monomials_of_degree: negative argument");
  std::vector<Monomial> out;
  if (nvars == 0) {
    if (degree == 0) out.emplace_back(0);
    return out;
  }
  out.reserve(binomial(nvars + degree - 1, degree));
  Monomial current(nvars);
  fill_monomials(0, degree, current, out);
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

}  // namespace delaynf
