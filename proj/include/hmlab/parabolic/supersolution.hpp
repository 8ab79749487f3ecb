#pragma once

#include <optional>
#include <string>

#include "hmlab/core/field.hpp"
#include "hmlab/core/grid.hpp"
#include "hmlab/core/numerics.hpp"
#include "hmlab/kernels/radial_evolution.hpp"
#include "hmlab/parabolic/box_nu.hpp"

namespace hmlab::parabolic {

// Exponents, amplitudes and scales of the f- and g-barriers. Times in fields built from a
// spec start at tau.
struct SupersolutionSpec {
  double A = 1.0;
  double B = 0.0;
  double nu = 0.95;
  double beta0 = 0.5;
  double beta1 = 0.5;
  double gamma0 = 0.2;
  double gamma1 = 0.2;
  double rho = 1e-3;
  double rho1 = 1e-2;
  double kappa = 0.25;
  double tau = 0.0;

  // -nu < beta_i < nu, 0 < kappa <= 1/2, A >= 0 (beta0 = beta1 allowed).
  void validate_f() const;
  // Additionally -nu < gamma_i < beta_i, rho <= rho1 <= kappa, nu > 0, B >= 0.
  void validate_g() const;
};

struct BarrierOptions {
  std::optional<TimeSchedule> schedule;  // levels relative to tau
  double multiplier = 0.0;               // 0 selects the default (2 for f, 4 for g)
  int max_doublings = 8;
};

struct Barrier {
  SpaceTimeField value;        // barrier for the PDE variable (f, or g / r)
  SpaceTimeField kernel_part;  // r^nu v_0 (f) or r^nu v_1 (g)
  SpaceTimeField boundary_part;  // r^nu v_2 (g only; empty for f)
  double multiplier = 0.0;
  int doublings = 0;
  double forcing_deficit = 0.0;  // max(forcing - discrete box_nu(power terms)) after enlargement
};

// Initial traces and forcing used by the barrier checks.
double f_trace_bound(const SupersolutionSpec& s, double r);  // A((rho/r)^b0 + r^b1)
double g_trace_bound(const SupersolutionSpec& s, double r);  // A((rho/r)^g0 + r^g1)
double g_forcing(const SupersolutionSpec& s, double r);      // A r^{-3}((rho/r)^b0 + r^b1)

// Grid on [rho, 1] (f) or [rho1, 1] (g) with the given nodes per decade.
RadialGrid f_grid(const SupersolutionSpec& s, double nodes_per_decade);
RadialGrid g_grid(const SupersolutionSpec& s, double nodes_per_decade);

// v = r^nu v_0 + m A((rho/r)^nu + r^nu) - A r^2 / (4 - nu^2), v_0 the Dirichlet heat
// flow in dimension 2(nu+1) of r^{-nu} f(r, tau). box_nu v = A in the continuum; the
// multiplier is doubled until boundary values dominate A and the initial slice
// dominates the seed. On the grid, nu in the power terms is replaced by the discrete
// exponent nu_h = acosh(1 + nu^2 ds^2 / 2) / ds, for which the centered stencil maps
// r^{+-nu_h} to zero exactly (nu_h -> nu as ds -> 0).
Barrier build_supersolution_f(const SupersolutionSpec& spec, const kernels::RadialFn& f_initial,
                              const RadialGrid& grid, double t_end, const BarrierOptions& opts = {});

// Barrier for q = g / r on [rho1, 1]:
//   r^nu (v_1 + v_2) + P + A r^nu,
// v_1 from the trace r^{-nu-1} g(r, tau), v_2 from the inner data rho1^{-nu-1} g(rho1, t),
// and P a sum of power terms with box_nu P = m * forcing. Each forcing term a r^e with
// beta = e + 2, d = nu^2 - beta^2 contributes
//   d > 0:  (m a / d) r^beta
//   d < 0:  (m a / |d|) (rho1^{beta+nu} r^{-nu} - r^beta)
//   d = 0:  (m a / 2 nu) r^{-nu} ln(r / rho1)
// which is non-negative on [rho1, 1]. The first case is the classical choice; the other
// two keep the correct sign when (beta0+1)^2 or (1-beta1)^2 exceeds nu^2. As for the
// f-barrier, d and nu use their discrete counterparts on the grid, so box_nu P equals
// m * forcing at every interior node up to rounding.
Barrier build_supersolution_g(const SupersolutionSpec& spec, const kernels::RadialFn& g_initial,
                              const kernels::RadialFn& g_inner, const RadialGrid& grid, double t_end,
                              const BarrierOptions& opts = {});

// Directly solved extremal sub-solutions: box_nu sub = forcing at its bound, boundary
// data at its bound, initial data = given trace. Same grid and time levels as the barrier.
SpaceTimeField solve_subsolution_f(const SupersolutionSpec& spec, const kernels::RadialFn& f_initial,
                                   const RadialGrid& grid, double t_end, const BarrierOptions& opts = {});
SpaceTimeField solve_subsolution_g(const SupersolutionSpec& spec, const kernels::RadialFn& g_initial,
                                   const kernels::RadialFn& g_inner, const RadialGrid& grid, double t_end,
                                   const BarrierOptions& opts = {});

// Field multiplied by r (q -> g).
SpaceTimeField times_r(const SpaceTimeField& q);

// Sup of field / envelope over the conclusion window, for barrier and solution alike.
struct ConclusionReport {
  double c_barrier = 0.0;
  double c_solution = 0.0;
  std::size_t samples = 0;
};
// Window rho/kappa <= r <= kappa, t >= tau + r^2/kappa^2;
// envelope A(kappa^{nu-b0}(rho/r)^b0 + kappa^{nu-b1} r^b1).
ConclusionReport conclusion_f(const SupersolutionSpec& spec, const SpaceTimeField& barrier,
                              const SpaceTimeField& solution);
// Window 2 rho1 <= r <= kappa, same time window; fields are g (already times r);
// envelope B rho1^{nu-1} r^{-nu} + A(kappa^{nu+g0+1}(rho/r)^g0 + kappa^{nu-g1+1} r^g1 + (rho/r)^b0 + r^b1).
ConclusionReport conclusion_g(const SupersolutionSpec& spec, const SpaceTimeField& barrier_g,
                              const SpaceTimeField& solution_g);

}  // namespace hmlab::parabolic
