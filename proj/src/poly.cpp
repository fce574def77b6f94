#include "delaynf/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "delaynf/errors.hpp"

namespace delaynf {

Poly::Poly(int nvars, int ncomponents, int nparams)
    : nvars_(nvars), nparams_(nparams), comps_(static_cast<std::size_t>(std::max(ncomponents, 0))) {
  if (nvars < 0 || nvars > kMaxVars) throw PreconditionError("poly: bad variable count");
  if (ncomponents < 1) throw PreconditionError("poly: need at least one component");
  if (nparams < 0 || nparams > nvars) throw PreconditionError("poly: bad parameter count");
}

void Poly::check_monomial(const Monomial& m) const {
  if (m.nvars() != nvars_) {
    throw PreconditionError("poly: monomial " + m.to_string() + " has " + std::to_string(m.nvars()) +
                            " variables, expected " + std::to_string(nvars_));
  }
}

void Poly::add(int k, const Monomial& m, cplx c) {
  check_monomial(m);
  if (c == cplx{}) return;
  auto& terms = comps_.at(static_cast<std::size_t>(k));
  auto [it, inserted] = terms.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx{}) terms.erase(it);
  }
}

void Poly::set(int k, const Monomial& m, cplx c) {
  check_monomial(m);
  auto& terms = comps_.at(static_cast<std::size_t>(k));
  if (c == cplx{}) {
    terms.erase(m);
  } else {
    terms[m] = c;
  }
}

cplx Poly::coeff(int k, const Monomial& m) const {
  const auto& terms = comps_.at(static_cast<std::size_t>(k));
  auto it = terms.find(m);
  return it == terms.end() ? cplx{} : it->second;
}

bool Poly::is_zero() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const Terms& t) { return t.empty(); });
}

std::size_t Poly::term_count() const {
  std::size_t n = 0;
  for (const auto& t : comps_) n += t.size();
  return n;
}

int Poly::max_degree() const {
  int d = -1;
  for (const auto& t : comps_) {
    for (const auto& [m, c] : t) d = std::max(d, m.degree());
  }
  return d;
}

int Poly::min_degree() const {
  int d = -1;
  for (const auto& t : comps_) {
    for (const auto& [m, c] : t) d = d < 0 ? m.degree() : std::min(d, m.degree());
  }
  return d;
}

Poly Poly::homogeneous_part(int degree) const {
  Poly r = zero_like();
  for (int k = 0; k < ncomponents(); ++k) {
    for (const auto& [m, c] : comps_[static_cast<std::size_t>(k)]) {
      if (m.degree() == degree) r.comps_[static_cast<std::size_t>(k)].emplace_hint(r.comps_[static_cast<std::size_t>(k)].end(), m, c);
    }
  }
  return r;
}

Poly Poly::truncated(int max_degree) const {
  Poly r = zero_like();
  for (int k = 0; k < ncomponents(); ++k) {
    for (const auto& [m, c] : comps_[static_cast<std::size_t>(k)]) {
      if (m.degree() <= max_degree) r.comps_[static_cast<std::size_t>(k)].emplace_hint(r.comps_[static_cast<std::size_t>(k)].end(), m, c);
    }
  }
  return r;
}

Poly Poly::pruned(double tol) const {
  Poly r = zero_like();
  for (int k = 0; k < ncomponents(); ++k) {
    for (const auto& [m, c] : comps_[static_cast<std::size_t>(k)]) {
      if (std::abs(c) > tol) r.comps_[static_cast<std::size_t>(k)].emplace_hint(r.comps_[static_cast<std::size_t>(k)].end(), m, c);
    }
  }
  return r;
}

Poly Poly::component_poly(int k) const {
  Poly r(nvars_, 1, nparams_);
  r.comps_[0] = comps_.at(static_cast<std::size_t>(k));
  return r;
}

double Poly::norm() const {
  double s = 0.0;
  for (const auto& t : comps_) {
    for (const auto& [m, c] : t) s += std::norm(c);
  }
  return std::sqrt(s);
}

double Poly::max_abs() const {
  double s = 0.0;
  for (const auto& t : comps_) {
    for (const auto& [m, c] : t) s = std::max(s, std::abs(c));
  }
  return s;
}

cplx Poly::evaluate(int k, std::span<const cplx> point) const {
  if (static_cast<int>(point.size()) != nvars_) throw PreconditionError("poly evaluate: point dimension mismatch");
  cplx sum{};
  for (const auto& [m, c] : comps_.at(static_cast<std::size_t>(k))) {
    cplx term = c;
    for (int i = 0; i < nvars_; ++i) {
      for (int e = 0; e < m[i]; ++e) term *= point[static_cast<std::size_t>(i)];
    }
    sum += term;
  }
  return sum;
}

bool Poly::same_shape(const Poly& other) const {
  return nvars_ == other.nvars_ && nparams_ == other.nparams_ && ncomponents() == other.ncomponents();
}

Poly& Poly::operator+=(const Poly& other) {
  if (!same_shape(other)) throw PreconditionError("poly sum: shape mismatch");
  for (int k = 0; k < ncomponents(); ++k) {
    for (const auto& [m, c] : other.comps_[static_cast<std::size_t>(k)]) add(k, m, c);
  }
  return *this;
}

Poly& Poly::operator-=(const Poly& other) {
  if (!same_shape(other)) throw PreconditionError("poly difference: shape mismatch");
  for (int k = 0; k < ncomponents(); ++k) {
    for (const auto& [m, c] : other.comps_[static_cast<std::size_t>(k)]) add(k, m, -c);
  }
  return *this;
}

Poly& Poly::operator*=(cplx scale) {
  if (scale == cplx{}) {
    for (auto& t : comps_) t.clear();
    return *this;
  }
  for (auto& t : comps_) {
    for (auto& [m, c] : t) c *= scale;
  }
  return *this;
}

std::string Poly::to_string() const {
  std::ostringstream os;
  os.precision(6);
  for (int k = 0; k < ncomponents(); ++k) {
    os << "comp " << k << ':';
    const auto& t = comps_[static_cast<std::size_t>(k)];
    if (t.empty()) os << " 0";
    for (const auto& [m, c] : t) os << ' ' << c << '*' << m.to_string();
    os << '\n';
  }
  return os.str();
}

Poly multiply(const Poly& a, const Poly& b, int max_degree) {
  if (a.ncomponents() != 1 || b.ncomponents() != 1) throw PreconditionError("multiply: scalar polynomials only");
  if (a.nvars() != b.nvars() || a.nparams() != b.nparams()) throw PreconditionError("multiply: variable mismatch");
  std::unordered_map<Monomial, cplx, MonomialHash> acc;
  acc.reserve(a[0].size() * b[0].size() / 2 + 1);
  for (const auto& [ma, ca] : a[0]) {
    for (const auto& [mb, cb] : b[0]) {
      if (max_degree >= 0 && ma.degree() + mb.degree() > max_degree) continue;
      acc[ma * mb] += ca * cb;
    }
  }
  Poly r = a.zero_like();
  for (const auto& [m, c] : acc) r.add(0, m, c);
  return r;
}

Poly times_monomial(const Poly& f, const Monomial& m) {
  Poly r = f.zero_like();
  for (int k = 0; k < f.ncomponents(); ++k) {
    for (const auto& [mm, c] : f[k]) r.add(k, mm * m, c);
  }
  return r;
}

Poly derivative(const Poly& f, int var) {
  if (var < 0 || var >= f.nvars()) throw PreconditionError("derivative: variable out of range");
  Poly r = f.zero_like();
  const Monomial step = Monomial::unit(f.nvars(), var);
  for (int k = 0; k < f.ncomponents(); ++k) {
    for (const auto& [m, c] : f[k]) {
      if (m[var] == 0) continue;
      r.add(k, m / step, c * static_cast<double>(m[var]));
    }
  }
  return r;
}

double distance(const Poly& a, const Poly& b) { return (a - b).norm(); }

Poly compose_linear(const Poly& f, const Eigen::MatrixXcd& M) {
  const int n_old = static_cast<int>(M.rows());
  const int n_new = static_cast<int>(M.cols());
  const int s = f.nparams();
  if (f.nvars() != n_old + s) {
    throw PreconditionError("compose_linear: polynomial has " + std::to_string(f.nvars()) + " variables, matrix expects " +
                            std::to_string(n_old) + " + " + std::to_string(s) + " parameters");
  }
  const int n_out = n_new + s;

  // Linear forms y -> (M y)_i in the new variables.
  std::vector<Poly> forms;
  forms.reserve(static_cast<std::size_t>(n_old));
  for (int i = 0; i < n_old; ++i) {
    Poly form(n_out, 1, s);
    for (int j = 0; j < n_new; ++j) form.add(0, Monomial::unit(n_out, j), M(i, j));
    forms.push_back(std::move(form));
  }

  // value(m) = prod_i forms[i]^{m_i}, memoized over the non-parameter part.
  std::map<Monomial, Poly, GradedLex> memo;
  Poly one(n_out, 1, s);
  one.add(0, Monomial(n_out), 1.0);
  memo.emplace(Monomial(n_old), one);
  auto value = [&](auto&& self, const Monomial& m) -> const Poly& {
    if (auto it = memo.find(m); it != memo.end()) return it->second;
    int last = n_old - 1;
    while (m[last] == 0) --last;
    const Poly& prev = self(self, m / Monomial::unit(n_old, last));
    Poly next = multiply(prev, forms[static_cast<std::size_t>(last)]);
    return memo.emplace(m, std::move(next)).first->second;
  };

  Poly r(n_out, f.ncomponents(), s);
  for (int k = 0; k < f.ncomponents(); ++k) {
    for (const auto& [m, c] : f[k]) {
      const Monomial state = m.slice(0, n_old);
      Monomial shift(n_out);
      for (int t = 0; t < s; ++t) shift.set(n_new + t, m[n_old + t]);
      const Poly& v = value(value, state);
      for (const auto& [mv, cv] : v[0]) r.add(k, mv * shift, c * cv);
    }
  }
  return r;
}

std::pair<Poly, Poly> split_parameter(const Poly& f) {
  Poly h = f.zero_like();
  Poly q = f.zero_like();
  const int first_param = f.nvars() - f.nparams();
  for (int k = 0; k < f.ncomponents(); ++k) {
    for (const auto& [m, c] : f[k]) {
      bool has_mu = false;
      for (int i = first_param; i < f.nvars(); ++i) has_mu = has_mu || m[i] > 0;
      (has_mu ? q : h).add(k, m, c);
    }
  }
  return {std::move(h), std::move(q)};
}

Monomial conjugate_monomial(const Monomial& m, int p) {
  Monomial r = m;
  for (int j = 1; j <= p; ++j) {
    r.set(2 * j - 1, m[2 * j]);
    r.set(2 * j, m[2 * j - 1]);
  }
  return r;
}

RealityReport check_reality(const Poly& f, double tol) {
  const int s = f.nparams();
  const int twice_p = f.nvars() - s - 2;
  if (twice_p < 0 || twice_p % 2 != 0) throw PreconditionError("check_reality: variables are not in the (x, nu, mu) layout");
  const int p = twice_p / 2;
  const int ncomp = f.ncomponents();
  if (ncomp != 2 * p + 1 && ncomp != 2 * p + 2 + s) {
    throw PreconditionError("check_reality: expected " + std::to_string(2 * p + 1) + " or " + std::to_string(2 * p + 2 + s) +
                            " components, got " + std::to_string(ncomp));
  }
  // Component k is mapped by the involution to partner(k); real rows map to themselves.
  auto partner = [p](int k) {
    if (k == 0 || k > 2 * p) return k;
    return (k % 2 == 1) ? k + 1 : k - 1;
  };
  RealityReport report;
  for (int k = 0; k < ncomp; ++k) {
    const int kk = partner(k);
    for (const auto& [m, c] : f[k]) {
      const Monomial mc = conjugate_monomial(m, p);
      const cplx expected = std::conj(c);
      const cplx actual = f.coeff(kk, mc);
      if (std::abs(actual - expected) > tol * std::max(1.0, std::abs(c))) {
        report.ok = false;
        report.first_violation = RealityViolation{kk, mc, expected, actual};
        return report;
      }
    }
  }
  return report;
}

}  // namespace delaynf
