#pragma once

#include <functional>
#include <vector>

#include "hmlab/core/grid.hpp"

namespace hmlab::flow {

// Corotational map u(r, theta) = (h(r), k theta) in polar coordinates on the round
// sphere, sampled on a log grid [r_min, r_max]. Node 0 is the origin proxy: the
// regularity condition h - origin_value ~ r^k is imposed there by the stepper.
struct CorotationalState {
  RadialGrid grid;
  std::vector<double> h;
  int k = 1;
  double time = 0.0;
  double boundary_value = 0.0;  // h at r_max, held fixed
  double origin_value = 0.0;    // h(0), a multiple of pi

  // Samples `profile` at the nodes; boundary_value = h at r_max, origin_value = the
  // multiple of pi nearest to h at r_min.
  static CorotationalState from_profile(const RadialGrid& grid, const std::function<double(double)>& profile,
                                        int k, double time = 0.0);

  // Finite, |h| <= 4 pi, k >= 1, sizes consistent. Throws PreconditionError.
  void validate() const;
};

// Degree-1 bubble 2 atan(r / sigma), and its degree-k analogue 2 atan((r/sigma)^k).
double bubble(double r, double sigma = 1.0, int k = 1);

// h_s = r h_r and h_ss on the nodes (fourth order).
std::vector<double> h_s(const CorotationalState& st);

// Tension h_rr + h_r / r - k^2 sin h cos h / r^2 with fourth-order stencils (the
// diagnostic). Zero at the two end nodes.
std::vector<double> tension(const CorotationalState& st);

// Discrete energy the stepper descends:
//   E_d = 2 pi [ sum_cells (h_{i+1} - h_i)^2 / ds + ds sum_i w_i k^2 sin^2 h_i + k (h_0 - a)^2 ],
// trapezoid weights w_i in s = ln r (the energy density is (h_s^2 + k^2 sin^2 h) ds). The
// last term is the energy of the disc r < r_min for h - a ~ r^k; without it the discrete
// minimizer sees a free (Neumann) end at r_min and picks up an r^{-k} component.
double discrete_energy(const CorotationalState& st);

// Tension of the scheme, tau_i = -(dE_d / dh_i) / (4 pi ds r_i^2), on nodes 1..n-2, with
// node 0 slaved to node 1 by the origin proxy. Zero at the end nodes.
std::vector<double> discrete_tension(const CorotationalState& st);

// int |T|^2 dV using the scheme's tension: sum over interior nodes of 2 pi ds r^2 tau^2.
double tension_l2(const CorotationalState& st);

// 2 pi int_{r_lo}^{r_hi} (h_r^2 + k^2 sin^2 h / r^2) r dr: trapezoid on the log grid with
// fourth-order h_s at the nodes, integrating the piecewise linear interpolant in s, so it
// is exactly additive over any split point.
double energy(const CorotationalState& st, double r_lo, double r_hi);

// Circle quantities at radius r (linear interpolation in s between nodes):
//   f0^2 = int |u_theta|^2 = 2 pi k^2 sin^2 h
//   f1^2 = int |nabla_theta u_theta|^2 = 2 pi k^4 sin^2 h cos^2 h   (cylindrical coordinates)
//   f = sqrt(f0^2 + f1^2),  g^2 = int r^2 |u_r|^2 = 2 pi h_s^2,  rdu = r |du| = sqrt(h_s^2 + k^2 sin^2 h).
struct PolarEnergies {
  double f = 0.0;
  double f0 = 0.0;
  double f1 = 0.0;
  double g = 0.0;
  double rdu = 0.0;
};
PolarEnergies polar_energies(const CorotationalState& st, double r);

// Node-wise profile of the same quantities.
struct EnergyProfile {
  std::vector<double> r, f, f0, f1, g, rdu;
};
EnergyProfile energy_profile(const CorotationalState& st);

// Ambient (R^3) derivative norms of u in cylindrical coordinates (s, theta):
//   d1 = |D u|, d2 = |D^2 u|, d3 = |D^3 u|  (all mixed partials, with multiplicity).
// On the flat disc these equal r|du|, r^2|nabla du|, r^3|nabla^2 du| up to factors
// depending only on the target, which is how the derivative bound eta is formed.
struct DerivativeNorms {
  std::vector<double> d1, d2, d3;
  std::vector<double> eta() const;  // d1 + d2 + d3
};
DerivativeNorms derivative_norms(const CorotationalState& st);

// Both sides of the circle identity int_{S_r} X^i X^j S_ij dtheta = int_{B_r} <T, X.du> dV
// with X = r d_r:  lhs = (g^2 - f0^2)/2 = pi (h_s^2 - k^2 sin^2 h),
// rhs = 2 pi int_{r_min}^{r} tau h_s r^2 ds (trapezoid in s, fourth-order tau and h_s).
// r is snapped to the nearest node. The disc below r_min is not included.
struct StressSample {
  double r = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};
StressSample stress_terms(const CorotationalState& st, double r);

// Node-wise lhs and rhs of the same identity, and the pointwise divergence form
// d_s lhs = 2 pi tau h_s r^2 (residual returned per node, zero at the ends).
std::vector<double> stress_divergence_residual(const CorotationalState& st);

// First radius (scanning outward, linear in s) where |h - origin_value| reaches pi/2;
// r_max if it never does.
double lambda_proxy(const CorotationalState& st);

// sup over nodes of |du| = rdu / r.
double max_gradient(const CorotationalState& st);

}  // namespace hmlab::flow
