#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "delaynf/parallel.hpp"
#include "delaynf/poly.hpp"
#include "delaynf/space.hpp"
#include "delaynf/spectral.hpp"

namespace delaynf {

// Delay points tau_1..tau_d in [-r, 0]; d = p + 1 unless probing optimality.
struct DelayTuple {
  std::vector<double> tau;

  int size() const { return static_cast<int>(tau.size()); }
  bool distinct() const;
  // Throws PreconditionError on duplicates or points outside [-r, 0].
  void validate(double r) const;
};

struct EMatrices {
  // 2d x (2p+2): rows (1, e^{i w1 t}, e^{-i w1 t}, ..., t) and (0, ..., 0, 1).
  Eigen::MatrixXcd ring;
  // d x (2p+1): the ring rows without the nu column and the (0,...,1) rows.
  Eigen::MatrixXcd plain;
};

EMatrices build_E_matrices(std::span<const double> omegas, const DelayTuple& tau);

enum class LiftFlavor { plain, ring };

std::string to_string(LiftFlavor flavor);

// Variable space of the delay nonlinearities with d slots.
SpaceDesc delay_space(int p, int s, int degree, int slots, LiftFlavor flavor, Flavor flavor_mu = Flavor::full);

// Psi(0) h(E x, mu): a 2p+1 component field in the center layout. plain takes
// h in (v_1..v_d, mu); ring takes h in (v_1, w_1, ..., v_d, w_d, mu) and
// feeds nu into every w slot.
Poly lift(const Poly& h, const SpectralData& data, const DelayTuple& tau, LiftFlavor flavor);

// Sets every w slot of a ring-layout polynomial to zero.
Poly restrict_R(const Poly& h);

struct CompositeMatrix {
  LiftFlavor flavor = LiftFlavor::plain;
  int p = 0;
  int s = 0;
  int degree = 0;
  int slots = 0;
  Basis domain;
  Basis target;
  // Radial projection of the equivariant part of each lifted domain monomial.
  Eigen::MatrixXd matrix;
  Eigen::VectorXd singular_values;
  int rank = 0;
  // Smallest of the min(rows, cols) singular values.
  double sigma_min = 0.0;
  // Ring flavor only: ||M_ring - M_plain M_R|| / max(||M_plain||, 1). NaN otherwise.
  double factorization_residual = 0.0;

  bool surjective() const { return rank == matrix.rows(); }
};

// Rank with threshold 1e-12 * max(m, n) * sigma_max.
int composite_rank(const Eigen::VectorXd& sigma, Eigen::Index rows, Eigen::Index cols);

// Matrix of R from the ring basis onto the plain basis.
Eigen::MatrixXd restriction_matrix(const Basis& ring, const Basis& plain);

CompositeMatrix composite_matrix(const SpectralData& data, const DelayTuple& tau, int degree, int s,
                                 LiftFlavor flavor, Execution exec = Execution::serial,
                                 Flavor domain_flavor = Flavor::full);

struct RankSample {
  int sample = 0;
  int degree = 0;
  bool degenerate = false;
  int rank = 0;
  int target_dim = 0;
  double sigma_min = 0.0;
};

struct DegreeSummary {
  int degree = 0;
  int valid = 0;
  int surjective = 0;
  double fraction = 0.0;
  // Minimum sigma_min over surjective samples; 0 when there are none.
  double min_sigma = 0.0;
};

struct RankScanReport {
  int p = 0;
  int s = 0;
  int slots = 0;
  std::vector<DelayTuple> taus;
  // Sample-major, degree-minor.
  std::vector<RankSample> samples;
  std::vector<DegreeSummary> degrees;
  // First scanned degree at which every valid sample is rank-deficient.
  std::optional<int> structural_degree;
};

RankScanReport rank_scan(const SpectralData& data, std::span<const int> degrees, int s,
                         std::span<const DelayTuple> samples, Execution exec = Execution::parallel);

// Uniform draws from [-r, 0]^d with pairwise separation >= r/100.
std::vector<DelayTuple> sample_delays(double r, int d, int count, std::uint64_t seed);

}  // namespace delaynf
