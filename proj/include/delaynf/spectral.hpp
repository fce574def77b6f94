#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace delaynf {

using cplx = std::complex<double>;

struct DelayAtom {
  double theta = 0.0;
  double weight = 0.0;
};

// Discrete delay measure d eta = sum_i weight_i delta(theta - theta_i) on [-r, 0].
struct DelayKernel {
  double r = 1.0;
  std::vector<DelayAtom> atoms;

  // Throws PreconditionError: no atoms, r <= 0, theta outside [-r, 0], duplicates.
  void validate() const;
};

// Delta(lambda) = lambda - sum_i w_i e^{lambda theta_i}.
cplx char_value(const DelayKernel& k, cplx lambda);
// Delta'(lambda) = 1 - sum_i w_i theta_i e^{lambda theta_i}.
cplx char_derivative(const DelayKernel& k, cplx lambda);

struct KernelDesign {
  DelayKernel kernel;
  double condition = 0.0;
  // max |Delta| over {0, i omega_j}.
  double max_residual = 0.0;
};

// Weights placing simple roots at 0 and +-i omega_j, from the real
// (2p+1)x(2p+1) system Delta(0) = 0, Re/Im Delta(i omega_j) = 0.
KernelDesign design_kernel(std::span<const double> omegas, std::span<const double> delay_points);

struct ScanOptions {
  // Half-height of the window in Im; <= 0 selects 3 * max omega (or 3).
  double omega_max = 0.0;
  double re_max = 1.0;
  double strip_height = 0.5;
  double seed_spacing = 0.05;
  // |Re lambda| at or below this counts as on the axis.
  double axis_tol = 1e-8;
};

struct StripCount {
  double im_low = 0.0;
  double im_high = 0.0;
  int winding = 0;
  int harvested = 0;
};

struct RootScan {
  double omega_max = 0.0;
  double re_max = 0.0;
  std::vector<cplx> axis_roots;   // sorted by Im
  std::vector<cplx> other_roots;  // remaining roots inside the window
  // min |Re| over other_roots; equals re_max when the window holds none.
  double margin = 0.0;
  bool margin_from_window = false;
  std::vector<StripCount> strips;
};

// Grid-seeded Newton harvest checked strip by strip against the winding
// number of Delta. Throws NumericalError when the counts disagree after
// refinement.
RootScan find_imaginary_roots(const DelayKernel& k, const ScanOptions& options = {});

struct SpectralData {
  std::vector<double> omegas;
  // 0, i w_1, -i w_1, ..., i w_p, -i w_p.
  std::vector<cplx> roots;
  std::vector<cplx> delta_primes;
  // (u0, u1, conj u1, ...), u_k = 1 / Delta'(lambda_k).
  Eigen::VectorXcd psi0;
  double margin = 0.0;
  bool margin_from_window = false;
};

// Assembles the spectral data for a kernel and its designated frequencies.
// Throws PreconditionError when some lambda_k is not a root (|Delta| > 1e-10)
// or the frequencies are not positive and increasing.
SpectralData spectral_data(const DelayKernel& k, std::span<const double> omegas, const ScanOptions& options = {});

struct HypothesisReport {
  bool roots_ok = false;
  bool simple = false;
  double min_abs_delta_prime = 0.0;
  bool nonresonant = false;
  int r_max = 0;
  // First integer relation found (canonical sign: first nonzero entry positive).
  std::optional<std::vector<int>> relation;
  bool margin_positive = false;
  double margin = 0.0;
  bool ok() const { return roots_ok && simple && nonresonant && margin_positive; }
};

HypothesisReport verify_hypothesis(const DelayKernel& k, const SpectralData& data, int r_max = 12);

// Integer relation sum r_j omega_j = 0 with 0 < sum |r_j| <= r_max, or none.
std::optional<std::vector<int>> find_integer_relation(std::span<const double> omegas, int r_max, double tol = 1e-8);

struct PsiZero {
  Eigen::VectorXcd u;
  // The entry psi_{2p+2,1}(0) of the dual basis; zero for every kernel.
  cplx psi_nu = 0.0;
};

PsiZero psi_zero(const DelayKernel& k, std::span<const cplx> roots);

// (psi, phi) for psi(xi) = e^{-lambda xi} / Delta'(lambda), phi(theta) = e^{lambda' theta}.
// lambda == lambda' is only accepted at a root of Delta.
cplx bilinear_check(const DelayKernel& k, cplx lambda, cplx lambda_prime);

}  // namespace delaynf
