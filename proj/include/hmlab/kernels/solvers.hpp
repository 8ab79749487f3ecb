#pragma once

#include <optional>

#include "hmlab/core/field.hpp"
#include "hmlab/core/grid.hpp"
#include "hmlab/core/numerics.hpp"
#include "hmlab/kernels/heat_kernel.hpp"
#include "hmlab/kernels/radial_evolution.hpp"

namespace hmlab::kernels {

// Dirichlet solution operators for (d_t - Delta_mu) on [rho, R]. The grid must span
// exactly [params.rho, params.R].
struct SolverOptions {
  std::optional<TimeSchedule> schedule;  // default_schedule(grid, t_end) when empty
  double theta = 1.0;
};

// Geometric steps from ~(r_lo ds)^2 up to t_end / 50.
TimeSchedule default_schedule(const RadialGrid& grid, double t_end);

// v_0: initial data phi, zero at both ends for t > 0.
KernelField solve_ivp(const RadialFn& phi, const KernelParams& params, double t_end, const RadialGrid& grid,
                      const SolverOptions& opts = {});

// Harmonic profile with h(rho) = 1, h(R) = 0; logarithmic when |mu - 2| < 1e-6.
double boundary_profile_h(double r, const KernelParams& params);

// v_1: zero initial data, v(rho, t) = psi(t), v(R, t) = 0.
KernelField solve_boundary(const RadialFn& psi, const KernelParams& params, const RadialGrid& grid,
                           double t_end, const SolverOptions& opts = {});

// G = d_t y_1 with y_1 = solve_boundary(1). Row n is the backward difference
// (y_n - y_{n-1}) / dt_n stored at t_n, so the field starts at the first positive level
// and sum_n G_n dt_n reproduces y_1 exactly.
KernelField eval_G(const RadialGrid& grid, const KernelParams& params, double t_end, const SolverOptions& opts = {});

// Right-endpoint time integral of G up to level n (inclusive); equals y_1 at level n.
std::vector<double> integrate_G(const KernelField& G, std::size_t n);

// Running L^2(0, t) norm of psi on the time levels of a field (trapezoid in psi^2).
std::vector<double> running_l2(const RadialFn& psi, std::span<const double> times);

// Smallest C in each stated envelope, scanned over the sampled (r, t) window.
struct EnvelopeReport {
  double constant = 0.0;  // max ratio solution / envelope
  double at_r = 0.0;
  double at_t = 0.0;
  std::size_t samples = 0;
};

// |v_0| <= C A r^{-k} w^k(r,t) w^{mu-k}(R,t) over interior nodes and t >= t_min.
EnvelopeReport initial_value_envelope(const KernelField& v0, const KernelParams& params, double A, double k,
                                      double t_min);

// |v_1| <= C exp(-(r-rho)^2/6t) rho^{mu-2} r^{1-mu} ||psi||_{L^2(0,t)} for 2 rho <= r.
// Samples are restricted to t >= t_min and (r-rho)^2/6t <= max_exponent: the implicit
// scheme's tails are exponential rather than Gaussian, so very deep tails measure the
// scheme, not the kernel.
EnvelopeReport boundary_value_envelope(const KernelField& v1, const RadialFn& psi, const KernelParams& params,
                                       double t_min, double max_exponent);

// G <= C exp(-(r-rho)^2/5t) rho^{mu-2} t^{-1} (t+rho^2)^{1-mu/2} * min[(r-rho)/sqrt t, 1]
// (t <= 1) or min[r-rho, 1] (t >= 1). Same sampling restrictions; r - rho must span at
// least min_cells cells.
EnvelopeReport g_envelope(const KernelField& G, const KernelParams& params, double t_min, double max_exponent,
                          std::size_t min_cells);

}  // namespace hmlab::kernels
