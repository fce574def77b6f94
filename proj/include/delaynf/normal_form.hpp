#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "delaynf/poly.hpp"
#include "delaynf/realizability.hpp"
#include "delaynf/spectral.hpp"

namespace delaynf {

// z'(t) = L0 z_t + nu + eta(z(t+tau_1), ..., z(t+tau_d)) + xi(z(t+tau_1), ..., mu).
// eta and xi are scalar polynomials in the plain delay layout (d slots + s
// parameters) with real coefficients; eta is mu-free, xi vanishes at mu = 0.
struct RfdeModel {
  DelayKernel kernel;
  std::vector<double> omegas;
  DelayTuple delays;
  int s = 0;
  Poly eta;
  Poly xi;
  int order = 3;
  bool nu_forcing = true;

  // Zero eta and xi of the right shape.
  static RfdeModel with_zero_nonlinearity(DelayKernel kernel, std::vector<double> omegas, DelayTuple delays, int s,
                                          int order);
  Poly nonlinearity() const { return eta + xi; }
  // Throws PreconditionError for shape errors, terms of degree < 2, mu
  // dependence in eta, or mu-free terms in xi.
  void validate() const;
};

enum class NfMode { leading, ode_reduction };

std::string to_string(NfMode mode);

struct OdeJet {
  int p = 0;
  int s = 0;
  std::vector<double> omegas;
  // f = sum_j f_j on 2p+1 components in (x, nu, mu).
  Poly f;
  // f_j = h_j + q_j with h_j mu-free and q_j vanishing at mu = 0; index j, slots 0 and 1 unused.
  std::vector<Poly> h;
  std::vector<Poly> q;
  int order = 0;
};

// Lifts the nonlinearity through the ring flavor (z slot i fed by
// Phi(tau_i)(x, nu)) and splits each degree into (h_j, q_j).
OdeJet reduce_to_ode(const RfdeModel& model, const SpectralData& data);

struct NormalFormOutput {
  NfMode mode = NfMode::ode_reduction;
  int order = 0;
  int p = 0;
  int s = 0;
  std::vector<double> omegas;
  // Per degree j (slots 0 and 1 unused): equivariant terms, transformation
  // generators and the corrections induced by earlier degrees (Y mu-free, Z
  // vanishing at mu = 0).
  std::vector<Poly> g;
  std::vector<Poly> U;
  std::vector<Poly> Y;
  std::vector<Poly> Z;
  std::vector<double> homological_residual;
  Poly radial;
  Poly angular;

  Poly equivariant_field() const;
};

// Degree-by-degree normal form with x = y + U_j(y) for j = 2..order.
// leading mode keeps g_j = A(f_j) and skips the pushforward.
NormalFormOutput normal_form(const OdeJet& jet, int order, NfMode mode = NfMode::ode_reduction);

// The field after the substitution x = y + U(y):
// (I + D_x U)^{-1} [F(y + U) - L U], truncated at `order`. F and U have 2p+1
// components in (x, nu, mu); nu and mu are not transformed.
Poly transform_field(const Poly& F, const Poly& U, std::span<const double> omegas, int order);

struct PolarSystem {
  std::vector<double> omegas;
  // rho_0' = nu + radial_0, rho_j' = radial_j.
  Poly radial;
  // theta_j' = omega_j + angular_{j-1}.
  Poly angular;
  bool nu_forcing = true;
};

PolarSystem polar_decouple(const NormalFormOutput& nf);

struct GuckenheimerCoefficients {
  // A20, A11, A02, A30, A21, A12, A03.
  std::array<double, 7> A{};
  double a1 = 0, a2 = 0, a3 = 0, a4 = 0;
  double b1 = 0, b2 = 0, b3 = 0;
  NormalFormOutput nf;
};

// Quadratic plus cubic nonlinearity in (z(t+tau_1), z(t+tau_2)); returns the
// coefficients of rho_0' = nu + a1 rho0^2 + a2 rho1^2 + a3 rho0^3 + a4 rho0 rho1^2,
// rho_1' = b1 rho0 rho1 + b2 rho1^3 + b3 rho1 rho0^2.
GuckenheimerCoefficients guckenheimer_example(const std::array<double, 7>& A, const DelayTuple& tau,
                                              const SpectralData& data, const DelayKernel& kernel,
                                              NfMode mode = NfMode::ode_reduction);

// Radial jet of a model in the given mode (reduce, normal form, polar).
Poly radial_jet(const RfdeModel& model, const SpectralData& data, NfMode mode);

}  // namespace delaynf
