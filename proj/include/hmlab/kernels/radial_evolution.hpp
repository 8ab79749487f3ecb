#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hmlab/core/field.hpp"
#include "hmlab/core/grid.hpp"

namespace hmlab::kernels {

// L v = r^{-2} (v_ss + drift * v_s - potential * v) in s = ln r.
//   drift = mu - 2, potential = 0      ->  Delta_mu
//   drift = 0,      potential = nu^2   ->  the spatial part of box_nu
struct RadialOperator {
  double drift = 0.0;
  double potential = 0.0;
};

using RadialFn = std::function<double(double)>;
using SpaceTimeFn = std::function<double(double, double)>;

struct EvolutionProblem {
  RadialOperator op;
  std::vector<double> initial;  // values at every node, t = times[0]
  RadialFn inner;               // v(r_lo, t) for t > times[0]
  RadialFn outer;               // v(r_hi, t)
  SpaceTimeFn forcing;          // F(r, t) in v_t = L v + F; empty means 0
  double theta = 1.0;           // 1 = backward Euler, 0.5 = Crank-Nicolson
};

// Theta-scheme on the given time levels with centered three-point stencils.
// For theta = 1 the system matrix is an M-matrix whenever |drift| ds < 2, so the
// discrete maximum principle holds at every step size.
SpaceTimeField evolve(const RadialGrid& grid, std::span<const double> times, const EvolutionProblem& problem);

// (L v)_i at interior nodes; entries 0 and n-1 are left at zero.
std::vector<double> apply_operator(const RadialGrid& grid, RadialOperator op, std::span<const double> v);

}  // namespace hmlab::kernels
