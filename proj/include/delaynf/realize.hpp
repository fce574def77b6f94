#pragma once

#include <vector>

#include "delaynf/normal_form.hpp"

namespace delaynf {

struct RealizationResult {
  DelayTuple tau;
  NfMode mode = NfMode::ode_reduction;
  // The realized model: eta mu-free, xi vanishing at mu = 0.
  RfdeModel model;
  // Radial jet produced by the forward pipeline.
  Poly achieved;
  // Per degree j (slots 0 and 1 unused): ||achieved_j - target_j||, divided by
  // ||target_j|| when that is nonzero.
  std::vector<double> residual;

  const Poly& eta() const { return model.eta; }
  const Poly& xi() const { return model.xi; }
  double max_residual() const;
};

// Finds eta, xi with the given delays so that the radial normal form equals
// target_h + target_q up to `order`. Targets are radial polynomials in
// (rho_0..rho_p, mu) with p+1 components: target_h mu-free, target_q vanishing
// at mu = 0. Solved degree by degree with minimal-norm coefficients; throws
// NumericalError when a composite matrix is rank-deficient at tau.
RealizationResult realize_jet(const SpectralData& data, const DelayKernel& kernel, const DelayTuple& tau,
                              const Poly& target_h, const Poly& target_q, int order,
                              NfMode mode = NfMode::ode_reduction);

// Keeps the base model's eta (and any xi) and adds a xi vanishing at mu = 0 so
// that the radial jet equals target. The mu = 0 slice of target must match the
// base model's radial jet. Parameter-dependent terms are matched in degrees
// 2..unfold_degree (0 means the model order); higher ones are left free.
RealizationResult realize_unfolding(const SpectralData& data, const RfdeModel& base, const Poly& target,
                                    NfMode mode = NfMode::ode_reduction, int unfold_degree = 0);

}  // namespace delaynf
