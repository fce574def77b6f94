#pragma once

#include <span>
#include <vector>

#include "delaynf/poly.hpp"
#include "delaynf/space.hpp"

namespace delaynf {

// Shape of a center-layout polynomial: p Hopf pairs, s parameters.
struct CenterShape {
  int p = 0;
  int s = 0;
};

// Reads (p, s) off a polynomial in the center layout; throws when the
// variable or component count does not fit.
CenterShape center_shape(const Poly& f);

// Torus weight of component k: 0 for x0, +e_j for x_j, -e_j for conj x_j.
// Components past 2p (nu, mu rows of an extended field) carry weight 0.
std::vector<int> component_weight(int p, int k);

// delta_j = (a_j - b_j) - w_{k,j}. Zero iff the monomial is torus-resonant
// in component k; exact because the frequencies are rationally independent.
std::vector<int> resonance_defect(int p, int k, const Monomial& m);
bool is_resonant(int p, int k, const Monomial& m);

// <delta(k, m), omega>: the frequency the torus flow attaches to the term.
double resonance_frequency(std::span<const double> omegas, int k, const Monomial& m);

// Haar projection with nu frozen at zero: keeps resonant, nu-free terms.
Poly project_A_ring(const Poly& f);

// Haar projection on nu-independent fields. Throws if f depends on nu.
Poly project_A(const Poly& f);

enum class EquivariantKind { torus_nu_independent, full_gamma };

// torus_nu_independent: real basis of the nu-independent torus-equivariant
// fields on 2p+1 components (conjugate pairs enter as Re/Im couples).
// full_gamma: basis of degree-`degree` fields on 2p+2+s components that
// commute with the torus and with the nilpotent flow nu -> nu + Theta x0.
std::vector<Poly> equivariant_basis(int p, int s, int degree, EquivariantKind kind);

// Z_{2,p}-equivariant radial monomials: component 0 carries even powers of
// every rho_j (j >= 1); component j carries an odd power of rho_j and even
// powers of the others.
bool is_radially_equivariant(int p, int component, const Monomial& m);
SpaceDesc radial_space(int p, int s, int degree, Flavor flavor = Flavor::full);
Basis radial_basis(int p, int s, int degree, Flavor flavor = Flavor::full);

// Radial part of a torus-equivariant field under x0 = rho_0,
// x_j = rho_j e^{i theta_j}: component 0 -> Re a_0, component j -> Re(a_j) rho_j.
// Throws PreconditionError naming the first non-equivariant term.
Poly radial_project(const Poly& f);

// Nonlinear angular right-hand sides Im(a_j) on p components in the radial
// variables. The constant omega_j is not included.
Poly angular_extract(const Poly& f);

// (1/T) int_0^T e^{Bs} f(e^{-Bs} x, mu) ds by composite Simpson quadrature
// with n_steps panels. Throws if n_steps under-resolves the fastest phase.
Poly time_average(const Poly& f, std::span<const double> omegas, double T, int n_steps);

}  // namespace delaynf
