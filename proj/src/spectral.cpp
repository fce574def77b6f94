#include "delaynf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "delaynf/errors.hpp"
#include "delaynf/linalg.hpp"

namespace delaynf {

void DelayKernel::validate() const {
  if (atoms.empty()) throw PreconditionError("kernel: at least one atom is required");
  if (!(r > 0.0)) throw PreconditionError("kernel: r must be positive");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double t = atoms[i].theta;
    if (!(t <= 0.0 && t >= -r)) {
      throw PreconditionError("kernel: atom " + std::to_string(i) + " at theta=" + std::to_string(t) +
                              " lies outside [-r, 0]");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (atoms[j].theta == t) throw PreconditionError("kernel: duplicate atom at theta=" + std::to_string(t));
    }
  }
}

cplx char_value(const DelayKernel& k, cplx lambda) {
  cplx v = lambda;
  for (const auto& a : k.atoms) v -= a.weight * std::exp(lambda * a.theta);
  return v;
}

cplx char_derivative(const DelayKernel& k, cplx lambda) {
  cplx v = 1.0;
  for (const auto& a : k.atoms) v -= a.weight * a.theta * std::exp(lambda * a.theta);
  return v;
}

KernelDesign design_kernel(std::span<const double> omegas, std::span<const double> delay_points) {
  const int p = static_cast<int>(omegas.size());
  const int n = 2 * p + 1;
  if (static_cast<int>(delay_points.size()) != n) {
    throw PreconditionError("design_kernel: need 2p+1 = " + std::to_string(n) + " delay points, got " +
                            std::to_string(delay_points.size()));
  }
  for (double w : omegas) {
    if (!(w > 0.0)) throw PreconditionError("design_kernel: frequencies must be positive");
  }
  DelayKernel kernel;
  kernel.r = 0.0;
  for (double t : delay_points) {
    kernel.r = std::max(kernel.r, -t);
    kernel.atoms.push_back({t, 0.0});
  }
  if (kernel.r == 0.0) kernel.r = 1.0;
  kernel.validate();

  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double t = delay_points[static_cast<std::size_t>(i)];
    A(0, i) = 1.0;
    for (int j = 0; j < p; ++j) {
      const double w = omegas[static_cast<std::size_t>(j)];
      A(1 + 2 * j, i) = std::cos(w * t);
      A(2 + 2 * j, i) = std::sin(w * t);
    }
  }
  // Im Delta(i w) = 0  <=>  sum w_i sin(w theta_i) = w.
  for (int j = 0; j < p; ++j) b(2 + 2 * j) = omegas[static_cast<std::size_t>(j)];

  const Eigen::VectorXd sigma = linalg::singular_values(A);
  const double cond = sigma(n - 1) > 0.0 ? sigma(0) / sigma(n - 1) : std::numeric_limits<double>::infinity();
  if (!(cond < 1e12)) {
    std::ostringstream msg;
    msg << "design_kernel: placement system is singular (condition number " << cond << ")";
    throw PreconditionError(msg.str());
  }
  const Eigen::VectorXd weights = A.colPivHouseholderQr().solve(b);
  for (int i = 0; i < n; ++i) kernel.atoms[static_cast<std::size_t>(i)].weight = weights(i);

  KernelDesign out{kernel, cond, std::abs(char_value(kernel, 0.0))};
  for (double w : omegas) out.max_residual = std::max(out.max_residual, std::abs(char_value(kernel, cplx{0.0, w})));
  return out;
}

namespace {

struct Window {
  double re_low, re_high, im_low, im_high;
  bool contains(cplx z) const {
    return z.real() >= re_low && z.real() <= re_high && z.imag() >= im_low && z.imag() <= im_high;
  }
};

std::optional<cplx> newton(const DelayKernel& k, cplx z) {
  for (int it = 0; it < 80; ++it) {
    const cplx d = char_derivative(k, z);
    if (std::abs(d) < 1e-14) return std::nullopt;
    const cplx step = char_value(k, z) / d;
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > 1e6) return std::nullopt;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
  }
  if (std::abs(char_value(k, z)) > 1e-10 * (1.0 + std::abs(z))) return std::nullopt;
  return z;
}

void harvest(const DelayKernel& k, const Window& seeds, double spacing, std::vector<cplx>& roots) {
  const int nx = std::max(2, static_cast<int>(std::ceil((seeds.re_high - seeds.re_low) / spacing)) + 1);
  const int ny = std::max(2, static_cast<int>(std::ceil((seeds.im_high - seeds.im_low) / spacing)) + 1);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const cplx z0{seeds.re_low + (seeds.re_high - seeds.re_low) * ix / (nx - 1),
                    seeds.im_low + (seeds.im_high - seeds.im_low) * iy / (ny - 1)};
      const auto z = newton(k, z0);
      if (!z) continue;
      const bool seen = std::any_of(roots.begin(), roots.end(), [&](cplx r) { return std::abs(r - *z) < 1e-7; });
      if (!seen) roots.push_back(*z);
    }
  }
}

// Change of arg Delta along [a, b], refined until each step turns less than pi/8.
double arg_change(const DelayKernel& k, cplx a, cplx b, cplx fa, cplx fb, int depth, double& min_abs) {
  const double turn = std::arg(fb / fa);
  if (std::abs(turn) < std::numbers::pi / 8 || depth > 40) return turn;
  const cplx m = 0.5 * (a + b);
  const cplx fm = char_value(k, m);
  min_abs = std::min(min_abs, std::abs(fm));
  return arg_change(k, a, m, fa, fm, depth + 1, min_abs) + arg_change(k, m, b, fm, fb, depth + 1, min_abs);
}

// Number of zeros of Delta inside the rectangle, from the winding number.
int winding(const DelayKernel& k, const Window& w, double& min_abs, double& fractional) {
  const cplx corners[5] = {{w.re_low, w.im_low}, {w.re_high, w.im_low}, {w.re_high, w.im_high},
                           {w.re_low, w.im_high}, {w.re_low, w.im_low}};
  double total = 0.0;
  min_abs = std::numeric_limits<double>::infinity();
  for (int e = 0; e < 4; ++e) {
    const cplx a = corners[e];
    const cplx b = corners[e + 1];
    const int n = std::max(16, static_cast<int>(std::ceil(std::abs(b - a) / 0.01)));
    cplx prev = a;
    cplx fprev = char_value(k, a);
    min_abs = std::min(min_abs, std::abs(fprev));
    for (int i = 1; i <= n; ++i) {
      const cplx z = a + (b - a) * (static_cast<double>(i) / n);
      const cplx fz = char_value(k, z);
      min_abs = std::min(min_abs, std::abs(fz));
      total += arg_change(k, prev, z, fprev, fz, 0, min_abs);
      prev = z;
      fprev = fz;
    }
  }
  const double turns = total / (2.0 * std::numbers::pi);
  fractional = std::abs(turns - std::round(turns));
  return static_cast<int>(std::lround(turns));
}

// Moves `edge` away from every root closer than `clearance`.
double clear_edge(double edge, const std::vector<cplx>& roots, bool vertical, double clearance, double shift) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    const bool hit = std::any_of(roots.begin(), roots.end(), [&](cplx r) {
      return std::abs((vertical ? r.real() : r.imag()) - edge) < clearance;
    });
    if (!hit) break;
    edge += shift;
  }
  return edge;
}

}  // namespace

RootScan find_imaginary_roots(const DelayKernel& k, const ScanOptions& options) {
  k.validate();
  const double wmax = options.omega_max > 0.0 ? options.omega_max : 3.0;
  if (!(options.re_max > 0.0)) throw PreconditionError("find_imaginary_roots: re_max must be positive");
  RootScan out;
  out.omega_max = wmax;
  out.re_max = options.re_max;

  const double pad = 0.25;
  const Window seeds{-options.re_max - pad, options.re_max + pad, -wmax - pad, wmax + pad};
  std::vector<cplx> roots;
  harvest(k, seeds, options.seed_spacing, roots);

  const double clearance = 1e-6;
  const double re_low = clear_edge(-options.re_max, roots, true, clearance, -1e-3);
  const double re_high = clear_edge(options.re_max, roots, true, clearance, 1e-3);
  const int nstrips = std::max(1, static_cast<int>(std::ceil(2.0 * wmax / options.strip_height)));
  std::vector<double> edges(static_cast<std::size_t>(nstrips + 1));
  for (int i = 0; i <= nstrips; ++i) {
    const double y = -wmax + 2.0 * wmax * i / nstrips;
    const double shift = (i == 0 ? -1.0 : 1.0) * 1e-3 * options.strip_height;
    edges[static_cast<std::size_t>(i)] = clear_edge(y, roots, false, clearance, shift);
  }

  for (int i = 0; i < nstrips; ++i) {
    const Window strip{re_low, re_high, edges[static_cast<std::size_t>(i)], edges[static_cast<std::size_t>(i + 1)]};
    double min_abs = 0.0;
    double fractional = 0.0;
    int count = winding(k, strip, min_abs, fractional);
    auto harvested = [&] {
      return static_cast<int>(std::count_if(roots.begin(), roots.end(), [&](cplx r) { return strip.contains(r); }));
    };
    int found = harvested();
    if (found != count) {
      harvest(k, strip, options.seed_spacing / 8.0, roots);
      found = harvested();
    }
    if (found != count || fractional > 0.05) {
      std::ostringstream msg;
      msg << "find_imaginary_roots: strip Im in [" << strip.im_low << ", " << strip.im_high << "] has winding "
          << count << " but Newton harvested " << found << " roots (min |Delta| on boundary " << min_abs
          << "); refine seed_spacing";
      throw NumericalError(msg.str());
    }
    out.strips.push_back({strip.im_low, strip.im_high, count, found});
  }

  const Window counted{re_low, re_high, edges.front(), edges.back()};
  for (const cplx r : roots) {
    if (!counted.contains(r)) continue;
    if (std::abs(r.real()) <= options.axis_tol) {
      out.axis_roots.push_back(r);
    } else {
      out.other_roots.push_back(r);
    }
  }
  std::sort(out.axis_roots.begin(), out.axis_roots.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
  std::sort(out.other_roots.begin(), out.other_roots.end(), [](cplx a, cplx b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });
  out.margin = options.re_max;
  out.margin_from_window = out.other_roots.empty();
  for (const cplx r : out.other_roots) out.margin = std::min(out.margin, std::abs(r.real()));
  return out;
}

SpectralData spectral_data(const DelayKernel& k, std::span<const double> omegas, const ScanOptions& options) {
  k.validate();
  SpectralData d;
  d.omegas.assign(omegas.begin(), omegas.end());
  for (std::size_t j = 0; j < omegas.size(); ++j) {
    if (!(omegas[j] > 0.0) || (j > 0 && !(omegas[j] > omegas[j - 1]))) {
      throw PreconditionError("spectral data: frequencies must be positive and strictly increasing");
    }
  }
  d.roots.push_back(0.0);
  for (double w : omegas) {
    d.roots.emplace_back(0.0, w);
    d.roots.emplace_back(0.0, -w);
  }
  for (const cplx lambda : d.roots) {
    const double res = std::abs(char_value(k, lambda));
    if (res > 1e-10) {
      std::ostringstream msg;
      msg << "spectral data: lambda = " << lambda.real() << (lambda.imag() < 0 ? "-" : "+") << std::abs(lambda.imag())
          << "i is not a root (|Delta| = " << res << ")";
      throw PreconditionError(msg.str());
    }
    d.delta_primes.push_back(char_derivative(k, lambda));
  }
  d.psi0 = psi_zero(k, d.roots).u;

  ScanOptions scan = options;
  if (scan.omega_max <= 0.0) scan.omega_max = 3.0 * (omegas.empty() ? 1.0 : omegas.back());
  const RootScan rs = find_imaginary_roots(k, scan);
  d.margin = rs.margin;
  d.margin_from_window = rs.margin_from_window;
  return d;
}

std::optional<std::vector<int>> find_integer_relation(std::span<const double> omegas, int r_max, double tol) {
  const int p = static_cast<int>(omegas.size());
  if (p < 2) return std::nullopt;
  std::vector<int> r(static_cast<std::size_t>(p), 0);
  std::optional<std::vector<int>> best;
  // Enumerate by increasing height so the reported relation is the shortest one.
  for (int height = 1; height <= r_max && !best; ++height) {
    auto rec = [&](auto&& self, int j, int left, bool leading) -> bool {
      if (j == p) {
        if (left != 0) return false;
        double sum = 0.0;
        for (int i = 0; i < p; ++i) sum += r[static_cast<std::size_t>(i)] * omegas[static_cast<std::size_t>(i)];
        if (std::abs(sum) <= tol) {
          best = r;
          return true;
        }
        return false;
      }
      for (int v = left; v >= -left; --v) {
        if (leading && v < 0) break;
        r[static_cast<std::size_t>(j)] = v;
        if (self(self, j + 1, left - std::abs(v), leading && v == 0)) return true;
      }
      r[static_cast<std::size_t>(j)] = 0;
      return false;
    };
    rec(rec, 0, height, true);
  }
  return best;
}

HypothesisReport verify_hypothesis(const DelayKernel& k, const SpectralData& data, int r_max) {
  HypothesisReport rep;
  rep.r_max = r_max;
  rep.roots_ok = data.roots.size() == 2 * data.omegas.size() + 1;
  for (const cplx lambda : data.roots) rep.roots_ok = rep.roots_ok && std::abs(char_value(k, lambda)) <= 1e-10;
  rep.min_abs_delta_prime = std::numeric_limits<double>::infinity();
  for (const cplx lambda : data.roots) {
    rep.min_abs_delta_prime = std::min(rep.min_abs_delta_prime, std::abs(char_derivative(k, lambda)));
  }
  rep.simple = rep.min_abs_delta_prime >= 1e-8;
  rep.relation = find_integer_relation(data.omegas, r_max);
  rep.nonresonant = !rep.relation.has_value();
  rep.margin = data.margin;
  rep.margin_positive = data.margin > 0.0;
  return rep;
}

PsiZero psi_zero(const DelayKernel& k, std::span<const cplx> roots) {
  PsiZero out;
  out.u.resize(static_cast<Eigen::Index>(roots.size()));
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const cplx d = char_derivative(k, roots[i]);
    if (std::abs(d) < 1e-8) {
      std::ostringstream msg;
      msg << "psi_zero: Delta'(lambda_" << i << ") = " << std::abs(d) << " (root is not simple)";
      throw PreconditionError(msg.str());
    }
    out.u(static_cast<Eigen::Index>(i)) = 1.0 / d;
  }
  return out;
}

namespace {

// int_0^t e^{a xi} d xi
cplx exp_integral(cplx a, double t) {
  const cplx at = a * t;
  if (std::abs(at) < 1e-4) return t * (1.0 + at / 2.0 + at * at / 6.0 + at * at * at / 24.0);
  return (std::exp(at) - 1.0) / a;
}

}  // namespace

cplx bilinear_check(const DelayKernel& k, cplx lambda, cplx lambda_prime) {
  if (lambda == lambda_prime && std::abs(char_value(k, lambda)) > 1e-8) {
    throw PreconditionError("bilinear_check: lambda == lambda' is only defined at a root");
  }
  cplx s = 1.0;
  for (const auto& a : k.atoms) s -= a.weight * std::exp(lambda * a.theta) * exp_integral(lambda_prime - lambda, a.theta);
  const cplx d = char_derivative(k, lambda);
  if (std::abs(d) < 1e-14) throw PreconditionError("bilinear_check: Delta'(lambda) vanishes");
  return s / d;
}

}  // namespace delaynf
