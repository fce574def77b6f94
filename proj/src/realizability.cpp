#include "delaynf/realizability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "delaynf/errors.hpp"
#include "delaynf/linalg.hpp"
#include "delaynf/symmetry.hpp"

namespace delaynf {

bool DelayTuple::distinct() const {
  for (std::size_t i = 0; i < tau.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (tau[i] == tau[j]) return false;
    }
  }
  return true;
}

void DelayTuple::validate(double r) const {
  if (tau.empty()) throw PreconditionError("delays: at least one delay point is required");
  for (double t : tau) {
    if (!(t <= 0.0 && t >= -r)) {
      throw PreconditionError("delays: tau=" + std::to_string(t) + " lies outside [-r, 0] with r=" + std::to_string(r));
    }
  }
  if (!distinct()) throw PreconditionError("delays: delay points must be distinct");
}

EMatrices build_E_matrices(std::span<const double> omegas, const DelayTuple& tau) {
  if (!tau.distinct()) throw PreconditionError("build_E_matrices: delay points must be distinct");
  const int p = static_cast<int>(omegas.size());
  const int d = tau.size();
  EMatrices e{Eigen::MatrixXcd::Zero(2 * d, 2 * p + 2), Eigen::MatrixXcd::Zero(d, 2 * p + 1)};
  for (int i = 0; i < d; ++i) {
    const double t = tau.tau[static_cast<std::size_t>(i)];
    e.plain(i, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
      const cplx z = std::exp(cplx{0.0, omegas[static_cast<std::size_t>(j - 1)] * t});
      e.plain(i, 2 * j - 1) = z;
      e.plain(i, 2 * j) = std::conj(z);
    }
    e.ring.row(2 * i).head(2 * p + 1) = e.plain.row(i);
    e.ring(2 * i, 2 * p + 1) = t;
    e.ring(2 * i + 1, 2 * p + 1) = 1.0;
  }
  return e;
}

std::string to_string(LiftFlavor flavor) { return flavor == LiftFlavor::plain ? "plain" : "ring"; }

SpaceDesc delay_space(int p, int s, int degree, int slots, LiftFlavor flavor, Flavor flavor_mu) {
  return SpaceDesc{.p = p,
                   .s = s,
                   .degree = degree,
                   .components = 1,
                   .flavor = flavor_mu,
                   .layout = flavor == LiftFlavor::plain ? Layout::delay_plain : Layout::delay_ring,
                   .slots = slots};
}

Poly lift(const Poly& h, const SpectralData& data, const DelayTuple& tau, LiftFlavor flavor) {
  const int p = static_cast<int>(data.omegas.size());
  const int s = h.nparams();
  const int d = tau.size();
  if (h.ncomponents() != 1) throw PreconditionError("lift: expected a scalar polynomial");
  const int expected = (flavor == LiftFlavor::plain ? d : 2 * d) + s;
  if (h.nvars() != expected) {
    throw PreconditionError("lift: " + to_string(flavor) + " flavor with " + std::to_string(d) + " delays and s=" +
                            std::to_string(s) + " needs " + std::to_string(expected) + " variables, got " +
                            std::to_string(h.nvars()));
  }
  if (data.psi0.size() != 2 * p + 1) throw PreconditionError("lift: spectral data has no Psi(0)");
  const EMatrices e = build_E_matrices(data.omegas, tau);
  Eigen::MatrixXcd M;
  if (flavor == LiftFlavor::ring) {
    M = e.ring;
  } else {
    M = Eigen::MatrixXcd::Zero(d, 2 * p + 2);
    M.leftCols(2 * p + 1) = e.plain;
  }
  const Poly scalar = compose_linear(h, M);
  Poly out(2 * p + 2 + s, 2 * p + 1, s);
  for (int k = 0; k <= 2 * p; ++k) {
    const cplx u = data.psi0(k);
    for (const auto& [m, c] : scalar[0]) out.add(k, m, u * c);
  }
  return out;
}

Poly restrict_R(const Poly& h) {
  const int s = h.nparams();
  const int state = h.nvars() - s;
  if (state % 2 != 0) throw PreconditionError("restrict_R: ring layout needs an even number of slot variables");
  const int d = state / 2;
  Poly out(d + s, h.ncomponents(), s);
  for (int k = 0; k < h.ncomponents(); ++k) {
    for (const auto& [m, c] : h[k]) {
      Monomial r(d + s);
      bool w_free = true;
      for (int i = 0; i < d; ++i) {
        r.set(i, m[2 * i]);
        w_free = w_free && m[2 * i + 1] == 0;
      }
      if (!w_free) continue;
      for (int t = 0; t < s; ++t) r.set(d + t, m[state + t]);
      out.add(k, r, c);
    }
  }
  return out;
}

int composite_rank(const Eigen::VectorXd& sigma, Eigen::Index rows, Eigen::Index cols) {
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  return linalg::count_above(sigma, 1e-12 * static_cast<double>(std::max(rows, cols)) * sigma(0));
}

Eigen::MatrixXd restriction_matrix(const Basis& ring, const Basis& plain) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(plain.size(), ring.size());
  for (int col = 0; col < ring.size(); ++col) {
    const Poly image = restrict_R(ring.element(col));
    for (const auto& [m, c] : image[0]) R(plain.index_of(0, m), col) = c.real();
  }
  return R;
}

namespace {

Eigen::MatrixXd assemble(const SpectralData& data, const DelayTuple& tau, const Basis& domain, const Basis& target,
                         LiftFlavor flavor, Execution exec) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(target.size(), domain.size());
  const int n = domain.size();
  auto column = [&](int col) {
    const Poly image = radial_project(project_A_ring(lift(domain.element(col), data, tau, flavor)));
    M.col(col) = target.to_vector(image).real();
  };
  if (exec == Execution::parallel) {
    // Errors inside the region are rethrown after it.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
    for (int col = 0; col < n; ++col) {
      try {
        column(col);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (int col = 0; col < n; ++col) column(col);
  }
  return M;
}

}  // namespace

CompositeMatrix composite_matrix(const SpectralData& data, const DelayTuple& tau, int degree, int s,
                                 LiftFlavor flavor, Execution exec, Flavor domain_flavor) {
  const int p = static_cast<int>(data.omegas.size());
  const int d = tau.size();
  CompositeMatrix out;
  out.flavor = flavor;
  out.p = p;
  out.s = s;
  out.degree = degree;
  out.slots = d;
  out.domain = Basis(delay_space(p, s, degree, d, flavor, domain_flavor));
  Flavor target_flavor = Flavor::full;
  if (domain_flavor == Flavor::mu_independent || domain_flavor == Flavor::vanishing_at_mu0) target_flavor = domain_flavor;
  out.target = radial_basis(p, s, degree, target_flavor);
  out.matrix = assemble(data, tau, out.domain, out.target, flavor, exec);
  out.singular_values = linalg::singular_values(out.matrix);
  out.rank = composite_rank(out.singular_values, out.matrix.rows(), out.matrix.cols());
  const Eigen::Index k = std::min(out.matrix.rows(), out.matrix.cols());
  out.sigma_min = k > 0 ? out.singular_values(k - 1) : 0.0;
  out.factorization_residual = std::numeric_limits<double>::quiet_NaN();
  if (flavor == LiftFlavor::ring) {
    const Basis plain_domain(delay_space(p, s, degree, d, LiftFlavor::plain, domain_flavor));
    const Eigen::MatrixXd plain = assemble(data, tau, plain_domain, out.target, LiftFlavor::plain, exec);
    const Eigen::MatrixXd R = restriction_matrix(out.domain, plain_domain);
    out.factorization_residual = (out.matrix - plain * R).norm() / std::max(plain.norm(), 1.0);
  }
  return out;
}

RankScanReport rank_scan(const SpectralData& data, std::span<const int> degrees, int s,
                         std::span<const DelayTuple> samples, Execution exec) {
  RankScanReport rep;
  rep.p = static_cast<int>(data.omegas.size());
  rep.s = s;
  rep.slots = samples.empty() ? 0 : samples.front().size();
  rep.taus.assign(samples.begin(), samples.end());
  const int nd = static_cast<int>(degrees.size());
  const int total = static_cast<int>(samples.size()) * nd;
  rep.samples.resize(static_cast<std::size_t>(total));

  auto run = [&](int idx) {
    const int i = idx / nd;
    const int deg = degrees[static_cast<std::size_t>(idx % nd)];
    RankSample& out = rep.samples[static_cast<std::size_t>(idx)];
    out.sample = i;
    out.degree = deg;
    const DelayTuple& tau = samples[static_cast<std::size_t>(i)];
    if (!tau.distinct()) {
      out.degenerate = true;
      out.target_dim = radial_basis(rep.p, s, deg).size();
      return;
    }
    const CompositeMatrix cm = composite_matrix(data, tau, deg, s, LiftFlavor::plain, Execution::serial);
    out.rank = cm.rank;
    out.target_dim = cm.target.size();
    out.sigma_min = cm.sigma_min;
  };

  if (exec == Execution::parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
    for (int idx = 0; idx < total; ++idx) {
      try {
        run(idx);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (int idx = 0; idx < total; ++idx) run(idx);
  }

  for (int di = 0; di < nd; ++di) {
    DegreeSummary sum;
    sum.degree = degrees[static_cast<std::size_t>(di)];
    double min_sigma = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const RankSample& r = rep.samples[i * static_cast<std::size_t>(nd) + static_cast<std::size_t>(di)];
      if (r.degenerate) continue;
      ++sum.valid;
      if (r.rank == r.target_dim) {
        ++sum.surjective;
        min_sigma = std::min(min_sigma, r.sigma_min);
      }
    }
    sum.fraction = sum.valid ? static_cast<double>(sum.surjective) / sum.valid : 0.0;
    sum.min_sigma = sum.surjective ? min_sigma : 0.0;
    if (!rep.structural_degree && sum.valid > 0 && sum.surjective == 0) rep.structural_degree = sum.degree;
    rep.degrees.push_back(sum);
  }
  return rep;
}

std::vector<DelayTuple> sample_delays(double r, int d, int count, std::uint64_t seed) {
  if (!(r > 0.0)) throw PreconditionError("sample_delays: r must be positive");
  if (d < 1) throw PreconditionError("sample_delays: need at least one delay");
  if (d > 101) throw PreconditionError("sample_delays: cannot separate more than 101 points by r/100");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-r, 0.0);
  const double sep = r / 100.0;
  std::vector<DelayTuple> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    DelayTuple t;
    for (int i = 0; i < d; ++i) t.tau.push_back(unif(rng));
    bool ok = true;
    for (int i = 0; i < d && ok; ++i) {
      for (int j = 0; j < i && ok; ++j) ok = std::abs(t.tau[static_cast<std::size_t>(i)] - t.tau[static_cast<std::size_t>(j)]) >= sep;
    }
    if (ok) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace delaynf
