#include "delaynf/realize.hpp"

#include <algorithm>
#include <sstream>

#include <Eigen/Dense>

#include "delaynf/errors.hpp"
#include "delaynf/linalg.hpp"
#include "delaynf/symmetry.hpp"

namespace delaynf {

double RealizationResult::max_residual() const {
  double m = 0.0;
  for (double r : residual) m = std::max(m, r);
  return m;
}

namespace {

void check_target(const Poly& t, int p, int s, int order, const char* what) {
  if (t.nvars() != p + 1 + s || t.ncomponents() != p + 1 || t.nparams() != s) {
    throw PreconditionError(std::string(what) + ": expected a radial jet with " + std::to_string(p + 1) +
                            " components in " + std::to_string(p + 1 + s) + " variables");
  }
  if (!t.is_zero() && (t.min_degree() < 2 || t.max_degree() > order)) {
    throw PreconditionError(std::string(what) + ": degrees must lie in 2.." + std::to_string(order));
  }
  for (int k = 0; k <= p; ++k) {
    for (const auto& [m, c] : t[k]) {
      if (!is_radially_equivariant(p, k, m)) {
        throw PreconditionError(std::string(what) + ": term " + m.to_string() + " in component " + std::to_string(k) +
                                " breaks the reflection symmetry of the radial equations");
      }
      if (c.imag() != 0.0) throw PreconditionError(std::string(what) + ": coefficients must be real");
    }
  }
}

// Adds the coefficient vector over `domain` into eta (mu-free) or xi, dropping
// rounding noise below 1e-14 of the largest entry.
void add_coefficients(RfdeModel& model, const Basis& domain, const Eigen::VectorXd& c) {
  const int d = model.delays.size();
  const double floor = c.size() ? 1e-14 * c.cwiseAbs().maxCoeff() : 0.0;
  for (int i = 0; i < domain.size(); ++i) {
    if (std::abs(c(i)) <= floor) continue;
    const Monomial& m = domain[i].monomial;
    int mu = 0;
    for (int t = 0; t < model.s; ++t) mu += m[d + t];
    (mu == 0 ? model.eta : model.xi).add(0, m, c(i));
  }
}

Eigen::VectorXd solve_degree(const CompositeMatrix& cm, const Eigen::VectorXd& rhs) {
  if (!cm.surjective()) {
    std::ostringstream msg;
    msg << "realize: composite matrix at degree " << cm.degree << " has rank " << cm.rank << " < "
        << cm.matrix.rows() << " (sigma_min " << cm.sigma_min << "); resample the delays";
    throw NumericalError(msg.str());
  }
  const double cutoff = 1e-12 * static_cast<double>(std::max(cm.matrix.rows(), cm.matrix.cols())) *
                        (cm.singular_values.size() ? cm.singular_values(0) : 0.0);
  return linalg::min_norm_solve(cm.matrix, rhs, cutoff);
}

std::vector<double> degree_residuals(const Poly& achieved, const Poly& target, int order) {
  std::vector<double> res(static_cast<std::size_t>(order + 1), 0.0);
  for (int j = 2; j <= order; ++j) {
    const Poly t = target.homogeneous_part(j);
    const double diff = distance(achieved.homogeneous_part(j), t);
    const double scale = t.norm();
    res[static_cast<std::size_t>(j)] = scale > 0.0 ? diff / scale : diff;
  }
  return res;
}

}  // namespace

RealizationResult realize_jet(const SpectralData& data, const DelayKernel& kernel, const DelayTuple& tau,
                              const Poly& target_h, const Poly& target_q, int order, NfMode mode) {
  const int p = static_cast<int>(data.omegas.size());
  const int s = target_h.nparams();
  check_target(target_h, p, s, order, "target h");
  check_target(target_q, p, s, order, "target q");
  if (!split_parameter(target_h).second.is_zero()) throw PreconditionError("target h must not depend on mu");
  if (!split_parameter(target_q).first.is_zero()) throw PreconditionError("target q must vanish at mu = 0");
  tau.validate(kernel.r);

  RealizationResult out;
  out.tau = tau;
  out.mode = mode;
  out.model = RfdeModel::with_zero_nonlinearity(kernel, data.omegas, tau, s, order);
  const Poly target = target_h + target_q;

  // The composite map sends mu-free monomials to mu-free radial terms and the
  // rest to terms vanishing at mu = 0, so the two blocks are solved apart.
  std::vector<Flavor> blocks{Flavor::full};
  if (s > 0) blocks = {Flavor::mu_independent, Flavor::vanishing_at_mu0};
  for (int j = 2; j <= order; ++j) {
    std::vector<CompositeMatrix> cms;
    for (Flavor block : blocks) {
      cms.push_back(composite_matrix(data, tau, j, s, LiftFlavor::plain, Execution::serial, block));
    }
    // Degree j of the radial jet is affine in the degree-j coefficients, so
    // the remaining defect is solved again (iterative refinement).
    const Poly want = target.homogeneous_part(j);
    double last = -1.0;
    for (int pass = 0; pass < 3; ++pass) {
      Poly current = radial_space(p, s, j).zero();
      if (pass > 0 || (j > 2 && mode == NfMode::ode_reduction)) {
        current = radial_jet(out.model, data, mode).homogeneous_part(j);
      }
      const Poly defect = want - current;
      const double size = defect.norm();
      if (pass > 0 && (size <= 1e-15 * std::max(1.0, want.norm()) || (last >= 0.0 && size >= 0.5 * last))) break;
      last = size;
      const auto [rhs_h, rhs_q] = split_parameter(defect);
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        const Flavor block = blocks[b];
        const Poly& part = block == Flavor::vanishing_at_mu0 ? rhs_q : (block == Flavor::mu_independent ? rhs_h : defect);
        const Eigen::VectorXd rhs = cms[b].target.to_vector(part).real();
        add_coefficients(out.model, cms[b].domain, solve_degree(cms[b], rhs));
      }
    }
  }
  out.achieved = radial_jet(out.model, data, mode);
  out.residual = degree_residuals(out.achieved, target, order);
  return out;
}

RealizationResult realize_unfolding(const SpectralData& data, const RfdeModel& base, const Poly& target, NfMode mode,
                                    int unfold_degree) {
  if (base.s == 0) throw PreconditionError("realize_unfolding: the model has no unfolding parameters (s = 0)");
  base.validate();
  const int p = static_cast<int>(data.omegas.size());
  const int order = base.order;
  const int top = unfold_degree == 0 ? order : unfold_degree;
  if (top < 2 || top > order) {
    throw PreconditionError("realize_unfolding: unfold degree must lie in 2.." + std::to_string(order));
  }
  check_target(target, p, base.s, order, "target unfolding");

  const Poly base_radial = radial_jet(base, data, mode);
  const auto [base_h, base_q] = split_parameter(base_radial);
  const auto [target_h, target_q] = split_parameter(target);
  const double mismatch = distance(base_h, target_h);
  if (mismatch > 1e-9 * std::max(1.0, base_h.norm())) {
    std::ostringstream msg;
    msg << "realize_unfolding: target at mu = 0 differs from the base radial jet by " << mismatch;
    throw PreconditionError(msg.str());
  }

  RealizationResult out;
  out.tau = base.delays;
  out.mode = mode;
  out.model = base;
  for (int j = 2; j <= top; ++j) {
    const CompositeMatrix cm =
        composite_matrix(data, base.delays, j, base.s, LiftFlavor::plain, Execution::serial, Flavor::vanishing_at_mu0);
    const Poly current = split_parameter(radial_jet(out.model, data, mode).homogeneous_part(j)).second;
    const Eigen::VectorXd rhs = cm.target.to_vector(target_q.homogeneous_part(j) - current).real();
    add_coefficients(out.model, cm.domain, solve_degree(cm, rhs));
  }
  out.achieved = radial_jet(out.model, data, mode);
  // Above the unfolding degree only the mu = 0 slice is prescribed.
  Poly effective = target_h;
  const Poly achieved_q = split_parameter(out.achieved).second;
  for (int j = 2; j <= order; ++j) effective += (j <= top ? target_q : achieved_q).homogeneous_part(j);
  out.residual = degree_residuals(out.achieved, effective, order);
  return out;
}

}  // namespace delaynf
