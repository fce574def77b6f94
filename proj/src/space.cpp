#include "delaynf/space.hpp"

#include "delaynf/errors.hpp"

namespace delaynf {

std::string to_string(Layout layout) {
  switch (layout) {
    case Layout::center: return "center";
    case Layout::radial: return "radial";
    case Layout::delay_plain: return "delay_plain";
    case Layout::delay_ring: return "delay_ring";
  }
  return "?";
}

std::string to_string(Flavor flavor) {
  switch (flavor) {
    case Flavor::full: return "full";
    case Flavor::mu_independent: return "mu_independent";
    case Flavor::vanishing_at_mu0: return "vanishing_at_mu0";
    case Flavor::nu_independent: return "nu_independent";
  }
  return "?";
}

int SpaceDesc::nvars() const {
  switch (layout) {
    case Layout::center: return 2 * p + 2 + s;
    case Layout::radial: return p + 1 + s;
    case Layout::delay_plain: return slot_count() + s;
    case Layout::delay_ring: return 2 * slot_count() + s;
  }
  return 0;
}

int SpaceDesc::nu_index() const { return layout == Layout::center ? 2 * p + 1 : -1; }

void SpaceDesc::validate() const {
  if (p < 0) throw PreconditionError("space: p must be >= 0");
  if (s < 0) throw PreconditionError("space: s must be >= 0");
  if (degree < 2) throw PreconditionError("space: degree must be >= 2, got " + std::to_string(degree));
  if (nvars() > kMaxVars) throw PreconditionError("space: too many variables");
  bool ok = false;
  switch (layout) {
    case Layout::center: ok = components == 1 || components == 2 * p + 1 || components == 2 * p + 2 + s; break;
    case Layout::radial: ok = components == 1 || components == p + 1; break;
    case Layout::delay_plain:
    case Layout::delay_ring: ok = components == 1; break;
  }
  if (!ok) {
    throw PreconditionError("space: " + std::to_string(components) + " components invalid for layout " + to_string(layout));
  }
}

bool SpaceDesc::admits(const Monomial& m) const {
  if (m.nvars() != nvars() || m.degree() != degree) return false;
  int mu_degree = 0;
  for (int i = nvars() - s; i < nvars(); ++i) mu_degree += m[i];
  switch (flavor) {
    case Flavor::full: return true;
    case Flavor::mu_independent: return mu_degree == 0;
    case Flavor::vanishing_at_mu0: return mu_degree > 0;
    case Flavor::nu_independent: return nu_index() < 0 || m[nu_index()] == 0;
  }
  return false;
}

std::vector<BasisElement> enumerate_basis(const SpaceDesc& space) {
  space.validate();
  const auto mons = monomials_of_degree(space.nvars(), space.degree);
  std::vector<BasisElement> out;
  for (int k = 0; k < space.components; ++k) {
    for (const auto& m : mons) {
      if (space.admits(m)) out.push_back({k, m});
    }
  }
  return out;
}

Basis::Basis(const SpaceDesc& space) : Basis(space, enumerate_basis(space)) {}

Basis::Basis(const SpaceDesc& space, std::vector<BasisElement> elements)
    : space_(space), elements_(std::move(elements)) {
  index_.reserve(elements_.size());
  for (int i = 0; i < size(); ++i) {
    const auto& e = elements_[static_cast<std::size_t>(i)];
    if (!index_.emplace(Key{e.component, e.monomial}, i).second) {
      throw PreconditionError("basis: duplicate element " + e.monomial.to_string());
    }
  }
}

int Basis::index_of(int component, const Monomial& m) const {
  auto it = index_.find(Key{component, m});
  return it == index_.end() ? -1 : it->second;
}

Eigen::VectorXcd Basis::to_vector(const Poly& f) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(size());
  for (int k = 0; k < f.ncomponents(); ++k) {
    for (const auto& [m, c] : f[k]) {
      const int i = index_of(k, m);
      if (i < 0) {
        throw PreconditionError("basis: term " + m.to_string() + " in component " + std::to_string(k) +
                                " is outside the space");
      }
      v(i) = c;
    }
  }
  return v;
}

Poly Basis::from_vector(const Eigen::VectorXcd& v) const {
  Poly f = space_.zero();
  for (int i = 0; i < size(); ++i) {
    const auto& e = elements_[static_cast<std::size_t>(i)];
    f.add(e.component, e.monomial, v(i));
  }
  return f;
}

Poly Basis::element(int i) const {
  Poly f = space_.zero();
  const auto& e = elements_.at(static_cast<std::size_t>(i));
  f.add(e.component, e.monomial, 1.0);
  return f;
}

}  // namespace delaynf
